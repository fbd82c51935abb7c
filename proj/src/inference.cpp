#include "pcd/inference.hpp"

#include <algorithm>
#include <cmath>

namespace pcd {

const char* alternative_name(Alternative a) {
    return a == Alternative::segregation ? "segregation" : "association";
}
const char* statistic_name(Statistic s) { return s == Statistic::binomial ? "binomial" : "normal"; }

// ---------------------------------------------------------------------------
// Convex-hull correction
// ---------------------------------------------------------------------------

double expected_pi_out(int m) {
    if (m < 4) fail(errc::invalid_argument, "expected_pi_out requires m >= 4");
    return 1.7932 / m + 1.2229 / std::sqrt(static_cast<double>(m));
}

HullCorrection hull_correction(int n_outside, int n_total, int m) {
    if (n_total <= 0) fail(errc::invalid_argument, "hull_correction: empty sample");
    HullCorrection hc;
    hc.p_out = static_cast<double>(n_outside) / n_total;
    hc.expected_pi_out = expected_pi_out(m);
    hc.c_ch = 1.0 - (hc.p_out - hc.expected_pi_out);
    return hc;
}

// ---------------------------------------------------------------------------
// Small-sample table
// ---------------------------------------------------------------------------

double SmallSampleCoefficients::a(double x) const {
    return a1 / x + a2 / std::sqrt(x) + a3 / std::cbrt(x);
}

double SmallSampleCoefficients::b(double x) const {
    return 1.0 + b1 / x + b2 / std::sqrt(x) + b3 / std::cbrt(x);
}

const std::vector<SmallSampleCoefficients>& small_sample_table() {
    static const std::vector<SmallSampleCoefficients> rows = {
        {1.50, 10, -8.80, -30.94, 9.09, -18.81, 16.26, -4.42},
        {1.50, 20, 10.19, -58.15, 20.27, -11.16, 11.71, -3.24},
        {1.50, 30, 18.72, -77.36, 28.46, -6.85, 7.56, -1.62},
        {1.50, 40, 28.11, -99.66, 38.73, -5.23, 5.81, -0.92},
        {1.50, 50, 33.37, -115.58, 46.03, -3.93, 3.88, 0.03},
        {1.35, 10, -0.13, -34.35, 8.79, -16.29, 13.43, -3.43},
        {1.35, 20, 16.05, -58.95, 18.01, -10.49, 10.70, -3.04},
        {1.35, 30, 24.22, -77.98, 25.78, -5.59, 5.52, -0.82},
        {1.35, 40, 30.66, -95.07, 32.91, -4.02, 3.57, -0.06},
        {1.35, 50, 34.49, -107.87, 38.18, -3.07, 2.55, 0.42},
    };
    return rows;
}

const SmallSampleCoefficients& small_sample_row(double r, int m) {
    for (const auto& row : small_sample_table())
        if (std::fabs(row.r - r) <= 1e-9 && row.m == m) return row;
    fail(errc::unsupported_key,
         "small-sample coefficients exist only for r in {1.35, 1.5} and m in {10,20,30,40,50}");
}

double apply_small_sample(double s, long n, int m, int j_m, double r) {
    const SmallSampleCoefficients& row = small_sample_row(r, m);
    if (n <= 0 || j_m <= 0) fail(errc::invalid_argument, "apply_small_sample: bad n or j_m");
    const double x = static_cast<double>(n) / j_m;
    const double b = row.b(x);
    if (!(b > 0.0))
        fail(errc::numerical_breakdown, "small-sample scale b(n/J_m) is nonpositive");
    return (s - row.a(x)) / b;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

long b_statistic_untruncated(const DominationResult& dom) {
    return dom.gamma_total - 2L * dom.j_m;
}

long b_statistic(const DominationResult& dom) {
    return std::max(b_statistic_untruncated(dom), 0L);
}

double s_statistic(const DominationResult& dom, const NullDistribution& null) {
    if (null.regime != Regime::nondegenerate)
        fail(errc::degenerate_regime, "s_statistic requires the nondegenerate regime");
    const double sd = std::sqrt(null.sigma2 / null.j_m);
    return (dom.g_bar - null.mu) / sd;
}

double apply_hull_correction_b(long gamma_total, int j_m, const HullCorrection& hc) {
    if (gamma_total * hc.c_ch > 2.0 * j_m)
        return (gamma_total - 2.0 * j_m) * hc.c_ch;
    return 0.0;
}

double apply_hull_correction_s(double s, const HullCorrection& hc) { return s * hc.c_ch; }

// ---------------------------------------------------------------------------
// run_test
// ---------------------------------------------------------------------------

namespace {

void validate_config(const TestConfig& cfg, int m) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5))
        fail(errc::invalid_argument, "alpha must lie in (0, 0.5)");
    if (cfg.small_sample_correction) {
        if (cfg.statistic != Statistic::normal)
            fail(errc::invalid_argument, "small-sample correction applies to the normal statistic");
        if (cfg.params.r.is_infinite())
            fail(errc::unsupported_key, "small-sample correction needs r in {1.35, 1.5}");
        small_sample_row(cfg.params.r.finite_value(), m); // throws unsupported_key
    }
    if (cfg.hull_correction && m < 4)
        fail(errc::invalid_argument, "hull correction needs m >= 4");
}

} // namespace

TestResult run_test(std::span<const Point2> x_points, const Triangulation& tri,
                    const TestConfig& cfg) {
    if (x_points.empty()) fail(errc::invalid_argument, "X must be non-empty");
    validate_config(cfg, tri.m());

    TestResult res;
    res.alternative = cfg.alternative;
    res.statistic = cfg.statistic;
    res.alpha = cfg.alpha;
    res.null_params = null_distribution(cfg.params, tri.j_m(), cfg.quad);
    res.domination = domination_number(x_points, tri, cfg.params);

    const DominationResult& dom = res.domination;
    res.counts = {static_cast<long>(x_points.size()), tri.m(), tri.j_m(),
                  dom.n_inside, dom.n_outside, dom.min_n_j()};

    if (dom.min_n_j() < 10)
        res.warnings.push_back("small per-triangle counts: min n_j = " +
                               std::to_string(dom.min_n_j()) +
                               " < 10 (asymptotics want n_j large, ~100 per triangle)");
    if (!cfg.params.r.is_infinite()) {
        const double rv = cfg.params.r.finite_value();
        if (rv > 1.45 && rv < 1.5)
            res.warnings.push_back(
                "r in (1.45, 1.50) is not recommended: the test is extremely "
                "liberal against segregation and conservative against association");
    }
    if (dom.n_outside > 0 && !cfg.hull_correction)
        res.warnings.push_back(std::to_string(dom.n_outside) +
                               " X points outside the convex hull are ignored "
                               "(no hull correction requested)");

    HullCorrection hc;
    if (cfg.hull_correction) {
        hc = hull_correction(dom.n_outside, static_cast<int>(x_points.size()), tri.m());
        res.hull = hc;
        res.corrections_applied.push_back("convex-hull");
    }

    const Side side = cfg.alternative == Alternative::segregation ? Side::lower : Side::upper;

    if (cfg.statistic == Statistic::binomial) {
        const long u = b_statistic_untruncated(dom);
        res.statistic_raw = static_cast<double>(b_statistic(dom));
        double u_corr = static_cast<double>(u);
        if (cfg.hull_correction) {
            u_corr = u * hc.c_ch;
            res.statistic_final = apply_hull_correction_b(dom.gamma_total, dom.j_m, hc);
        } else {
            res.statistic_final = res.statistic_raw;
        }
        // Decisions live on the untruncated scale gamma - 2 J_m ~ Bin(J_m, 1-p_r);
        // the corrected statistic is real-valued, so the discrete tail uses
        // floor (lower) / ceil (upper).
        const double q = 1.0 - res.null_params.p_r;
        const long stat_int = side == Side::lower
                                  ? static_cast<long>(std::floor(u_corr))
                                  : static_cast<long>(std::ceil(u_corr));
        res.p_value = binomial_pvalue(stat_int, dom.j_m, q, side);
        res.critical_value = static_cast<double>(
            binomial_critical(dom.j_m, q, cfg.alpha, side));
    } else {
        const double s = s_statistic(dom, res.null_params);
        res.statistic_raw = s;
        double sf = s;
        if (cfg.hull_correction) sf = apply_hull_correction_s(sf, hc);
        if (cfg.small_sample_correction) {
            sf = apply_small_sample(sf, static_cast<long>(x_points.size()), tri.m(), dom.j_m,
                                    cfg.params.r.finite_value());
            res.corrections_applied.push_back("small-sample");
        }
        res.statistic_final = sf;
        res.p_value = normal_pvalue(sf, side);
        res.critical_value =
            side == Side::lower ? normal_quantile(cfg.alpha) : normal_quantile(1.0 - cfg.alpha);
    }

    res.reject = res.p_value <= cfg.alpha;
    return res;
}

TestResult run_test(std::span<const Point2> x_points, std::span<const Point2> y_points,
                    const TestConfig& cfg) {
    if (y_points.size() < 3)
        fail(errc::invalid_argument, "Y needs at least 3 points (3 = single-triangle mode)");
    const Triangulation tri = y_points.size() == 3 ? single_triangle(y_points)
                                                   : delaunay_triangulate(y_points);
    TestResult res = run_test(x_points, tri, cfg);
    for (const std::string& w : tri.warnings) res.warnings.push_back(w);
    return res;
}

long j_star(double alpha, Alternative alt, double epsilon, const NullDistribution& null) {
    if (!(epsilon > 0.0 && epsilon < std::sqrt(3.0) / 3.0))
        fail(errc::epsilon_out_of_range, "epsilon must lie in (0, sqrt(3)/3)");
    const double g_limit = alt == Alternative::association
                               ? 3.0
                               : (epsilon <= std::sqrt(3.0) / 4.0 ? 2.0 : 1.0);
    const double z = normal_quantile(alt == Alternative::association ? 1.0 - alpha : alpha);
    const double sigma = std::sqrt(null.sigma2);
    const double ratio = sigma * z / (g_limit - null.mu);
    return static_cast<long>(std::ceil(ratio * ratio));
}

} // namespace pcd
