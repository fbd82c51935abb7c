#pragma once

#include "pcd/digraph.hpp"

namespace pcd {

enum class Regime { nondegenerate, degenerate_one, degenerate_three };

enum class Side { lower, upper };

const char* regime_name(Regime r);
const char* side_name(Side s);

// Null parameters of the domination-number statistic in the nondegenerate
// regime: per-triangle limit 2 + Bernoulli(1 - p_r), so mu = 3 - p_r and
// sigma2 = p_r (1 - p_r).
struct NullDistribution {
    double r = 0.0;       // +inf encoded as infinity()
    double p_r = 0.0;
    Regime regime = Regime::nondegenerate;
    double mu = 0.0;
    double sigma2 = 0.0;
    int j_m = 0;
};

struct QuadratureConfig {
    double rel_tol = 1e-8;
    double truncation = 1.0; // upper bound in the u = w/(1+w) variable
    int max_subdivisions = 15;
};

// Classify the asymptotic regime for (r, M). Throws not_covered when no limit
// law exists (M outside the admissible inner triangle for r < 3/2, or
// r = 3/2 with M != M_C).
Regime regime_of(const Expansion& r, const CenterSpec& center);

// The stored constant for r = 3/2, M = M_C; this case is not given by the
// integral below.
inline constexpr double kPrThreeHalves = 0.7413;

struct PrResult {
    double value = 0.0;
    double abs_err = 0.0;
};

// P(gamma = 2) limit for r in (1, 3/2) with M a tau vertex, by adaptive 2-D
// quadrature of the Gaussian-type integrand over (0,inf)^2 after mapping each
// axis through w = u/(1-u). r = 3/2 returns the stored constant; r = 1 is
// degenerate (the 1/(r-1)^2 coefficient diverges).
PrResult p_r(double r, const QuadratureConfig& cfg = {});

// Solve p_r(r) = target over (1, 3/2); used for the variance-minimizing r.
double p_r_inverse(double target, const QuadratureConfig& cfg = {});

// Null distribution for the given parameters; requires the nondegenerate
// regime (throws degenerate_regime otherwise).
NullDistribution null_distribution(const PcdParams& params, int j_m,
                                   const QuadratureConfig& cfg = {});

// Exact binomial machinery (direct CDF summation).
double binomial_pmf(int k, int n, double p);
double binomial_cdf(long b, int n, double p);        // P(X <= b)
double binomial_tail_upper(long b, int n, double p); // P(X >= b)

// lower: largest b with P(X <= b) <= alpha (may be -1);
// upper: smallest b with P(X >= b) <= alpha (may be n+1).
int binomial_critical(int j_m, double p_success, double alpha, Side side);

double binomial_pvalue(long b_observed, int j_m, double p_success, Side side);

double normal_cdf(double s);
double normal_quantile(double q);
double normal_pvalue(double s, Side side);

} // namespace pcd
