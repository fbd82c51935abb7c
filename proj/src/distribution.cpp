#include "pcd/distribution.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pcd {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::nondegenerate: return "Nondegenerate";
        case Regime::degenerate_one: return "DegenerateOne";
        case Regime::degenerate_three: return "DegenerateThree";
    }
    return "?";
}

const char* side_name(Side s) { return s == Side::lower ? "lower" : "upper"; }

// ---------------------------------------------------------------------------
// Regime map
// ---------------------------------------------------------------------------

namespace {

constexpr double kWeightTol = 1e-12;

bool weights_equal(const Barycentric& a, const Barycentric& b, double tol = kWeightTol) {
    return std::fabs(a.b1 - b.b1) <= tol && std::fabs(a.b2 - b.b2) <= tol &&
           std::fabs(a.b3 - b.b3) <= tol;
}

bool is_tau_weights(const Barycentric& w, double r) {
    for (int i = 0; i < 3; ++i)
        if (weights_equal(w, tau_vertex_weights(i, r))) return true;
    return false;
}

const Barycentric kCentroid{1.0 / 3, 1.0 / 3, 1.0 / 3};

} // namespace

Regime regime_of(const Expansion& r, const CenterSpec& center) {
    if (r.is_infinite() || r.value() > 1.5) {
        // Interior M is enforced at resolution time; any such M gives the
        // a.s.-1 limit.
        resolve_center(center, r.is_infinite() ? 2.0 : r.value());
        return Regime::degenerate_one;
    }
    const double rv = r.finite_value();
    if (center.kind == CenterKind::tau_vertex) return Regime::nondegenerate;

    const Barycentric w = resolve_center(center, rv);
    if (rv == 1.5) {
        if (weights_equal(w, kCentroid)) return Regime::nondegenerate;
        fail(errc::not_covered, "no limit law for r = 3/2 with M != M_C");
    }
    if (is_tau_weights(w, rv)) return Regime::nondegenerate;
    if (in_tau_triangle(w, rv)) return Regime::degenerate_three;
    fail(errc::not_covered, "no limit law for M outside the inner tau triangle with r < 3/2");
}

// ---------------------------------------------------------------------------
// p_r quadrature
// ---------------------------------------------------------------------------

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

struct PrIntegrand {
    double scale;      // 64 r^2 / (9 (r-1)^2)
    double decay;      // 4 r / (3 (r-1))
    double cross;      // 2 r (r-1)

    double operator()(double w1, double w3) const {
        const double q = w1 * w1 + w3 * w3 + cross * w1 * w3;
        return scale * w1 * w3 * std::exp(-decay * q);
    }
};

} // namespace

PrResult p_r(double r, const QuadratureConfig& cfg) {
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-3))
        fail(errc::invalid_argument, "rel_tol must be in (0, 1e-3]");
    if (r == 1.5) return {kPrThreeHalves, 0.0};
    if (r == 1.0) fail(errc::r_degenerate, "p_r diverges at r = 1");
    if (!(r > 1.0 && r < 1.5)) fail(errc::r_out_of_range, "p_r requires r in (1, 3/2]");

    const double rm1 = r - 1.0;
    const PrIntegrand f{64.0 * r * r / (9.0 * rm1 * rm1), 4.0 * r / (3.0 * rm1),
                        2.0 * r * rm1};

    // Each axis is mapped from (0,inf) to (0,1) by w = u/(1-u); the Gaussian
    // decay keeps the transformed integrand smooth up to the truncation point.
    const double hi = std::min(cfg.truncation, 1.0);
    auto to_w = [](double u) { return u / (1.0 - u); };
    auto jac = [](double u) { const double d = 1.0 - u; return 1.0 / (d * d); };

    const unsigned depth = static_cast<unsigned>(std::max(cfg.max_subdivisions, 1));
    // Inner integrals are resolved a decade tighter than the outer one, so
    // their contribution to the outer error is bounded by inner_tol * |value|.
    const double inner_tol = cfg.rel_tol * 0.1;

    auto outer = [&](double u1) {
        if (u1 >= 1.0) return 0.0;
        const double w1 = to_w(u1);
        const double inner = GK::integrate(
            [&](double u3) {
                if (u3 >= 1.0) return 0.0;
                return f(w1, to_w(u3)) * jac(u3);
            },
            0.0, hi, depth, inner_tol);
        return inner * jac(u1);
    };

    double outer_err = 0.0;
    const double value = GK::integrate(outer, 0.0, hi, depth, cfg.rel_tol, &outer_err);

    const double abs_err = outer_err + (inner_tol + cfg.rel_tol) * std::fabs(value);
    if (!(value > 0.0 && value < 1.0) || !std::isfinite(value) ||
        outer_err > 100.0 * cfg.rel_tol * std::max(std::fabs(value), 1e-3))
        fail(errc::non_convergence, "p_r quadrature failed to converge");
    return {value, abs_err};
}

double p_r_inverse(double target, const QuadratureConfig& cfg) {
    // p_r is continuous and strictly decreasing on (1, 3/2); plain bisection.
    double lo = 1.0 + 1e-6, hi = 1.5 - 1e-9;
    double flo = p_r(lo, cfg).value - target;
    double fhi = p_r(hi, cfg).value - target;
    if (flo * fhi > 0.0) fail(errc::invalid_argument, "target not bracketed by p_r range");
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = p_r(mid, cfg).value - target;
        if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

NullDistribution null_distribution(const PcdParams& params, int j_m,
                                   const QuadratureConfig& cfg) {
    if (j_m < 1) fail(errc::invalid_argument, "j_m must be >= 1");
    const Regime reg = regime_of(params.r, params.center);
    if (reg != Regime::nondegenerate)
        fail(errc::degenerate_regime,
             std::string("binomial/normal inference requires the nondegenerate regime, got ") +
                 regime_name(reg));
    const double rv = params.r.finite_value();
    const double p = (rv == 1.5) ? kPrThreeHalves : p_r(rv, cfg).value;
    NullDistribution nd;
    nd.r = rv;
    nd.p_r = p;
    nd.regime = reg;
    nd.mu = 3.0 - p;
    nd.sigma2 = p * (1.0 - p);
    nd.j_m = j_m;
    return nd;
}

// ---------------------------------------------------------------------------
// Binomial / normal helpers
// ---------------------------------------------------------------------------

double binomial_pmf(int k, int n, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(logc + k * std::log(p) + (n - k) * std::log1p(-p));
}

double binomial_cdf(long b, int n, double p) {
    if (b < 0) return 0.0;
    if (b >= n) return 1.0;
    long double acc = 0.0L;
    for (int k = 0; k <= b; ++k) acc += binomial_pmf(k, n, p);
    return static_cast<double>(std::min(acc, 1.0L));
}

double binomial_tail_upper(long b, int n, double p) {
    if (b <= 0) return 1.0;
    if (b > n) return 0.0;
    long double acc = 0.0L;
    for (int k = static_cast<int>(b); k <= n; ++k) acc += binomial_pmf(k, n, p);
    return static_cast<double>(std::min(acc, 1.0L));
}

int binomial_critical(int j_m, double p_success, double alpha, Side side) {
    if (j_m < 1 || !(alpha > 0.0 && alpha <= 0.5) || !(p_success > 0.0 && p_success < 1.0))
        fail(errc::invalid_argument, "binomial_critical: bad arguments");
    if (side == Side::lower) {
        int b = -1;
        while (b + 1 <= j_m && binomial_cdf(b + 1, j_m, p_success) <= alpha) ++b;
        return b;
    }
    int b = j_m + 1;
    while (b - 1 >= 0 && binomial_tail_upper(b - 1, j_m, p_success) <= alpha) --b;
    return b;
}

double binomial_pvalue(long b_observed, int j_m, double p_success, Side side) {
    return side == Side::lower ? binomial_cdf(b_observed, j_m, p_success)
                               : binomial_tail_upper(b_observed, j_m, p_success);
}

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_cdf(double s) { return boost::math::cdf(kStdNormal, s); }

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) fail(errc::invalid_argument, "quantile needs q in (0,1)");
    return boost::math::quantile(kStdNormal, q);
}

double normal_pvalue(double s, Side side) {
    return side == Side::lower ? boost::math::cdf(kStdNormal, s)
                               : boost::math::cdf(boost::math::complement(kStdNormal, s));
}

} // namespace pcd
