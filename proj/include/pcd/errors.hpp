#pragma once

#include <stdexcept>
#include <string>

namespace pcd {

enum class errc {
    collinear_input,
    duplicate_points,
    degenerate_triangle,
    m_outside_triangle,
    p_outside_triangle,
    r_out_of_range,
    r_degenerate,
    non_convergence,
    not_covered,
    degenerate_regime,
    unsupported_key,
    numerical_breakdown,
    too_large,
    epsilon_out_of_range,
    invalid_argument,
    data_error,
};

// One exception type carrying a machine-checkable code; the CLI maps codes
// to exit codes (validation=2, data=3, numerical=4).
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::collinear_input: return "CollinearInput";
        case errc::duplicate_points: return "DuplicatePoints";
        case errc::degenerate_triangle: return "DegenerateTriangle";
        case errc::m_outside_triangle: return "MOutsideTriangle";
        case errc::p_outside_triangle: return "POutsideTriangle";
        case errc::r_out_of_range: return "ROutOfRange";
        case errc::r_degenerate: return "RDegenerate";
        case errc::non_convergence: return "NonConvergence";
        case errc::not_covered: return "NotCovered";
        case errc::degenerate_regime: return "DegenerateRegime";
        case errc::unsupported_key: return "UnsupportedKey";
        case errc::numerical_breakdown: return "NumericalBreakdown";
        case errc::too_large: return "TooLarge";
        case errc::epsilon_out_of_range: return "EpsilonOutOfRange";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::data_error: return "DataError";
    }
    return "Unknown";
}

} // namespace pcd
