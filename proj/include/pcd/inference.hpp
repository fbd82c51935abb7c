#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcd/distribution.hpp"

namespace pcd {

enum class Alternative { segregation, association };
enum class Statistic { binomial, normal };

const char* alternative_name(Alternative a);
const char* statistic_name(Statistic s);

struct TestConfig {
    PcdParams params;
    double alpha = 0.05;
    Alternative alternative = Alternative::segregation;
    Statistic statistic = Statistic::normal;
    bool hull_correction = false;
    bool small_sample_correction = false;
    QuadratureConfig quad{};
};

// ---------------------------------------------------------------------------
// Convex-hull correction: C_ch = 1 - (p_out - E[pi_out]) with the fitted
// expectation E[pi_out] = 1.7932/m + 1.2229/sqrt(m).
// ---------------------------------------------------------------------------

struct HullCorrection {
    double p_out = 0.0;
    double expected_pi_out = 0.0;
    double c_ch = 1.0;
};

double expected_pi_out(int m); // m >= 4

HullCorrection hull_correction(int n_outside, int n_total, int m);

// ---------------------------------------------------------------------------
// Small-sample adjustment S_adj = (S - a)/b with a, b polynomial in the
// reciprocal powers x^-1, x^-1/2, x^-1/3 of x = n/J_m; coefficients fitted
// per (r, m) with r in {1.35, 1.5} and m in {10,...,50}, no interpolation.
// ---------------------------------------------------------------------------

struct SmallSampleCoefficients {
    double r = 0.0;
    int m = 0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0; // a = a1/x + a2/sqrt(x) + a3/cbrt(x)
    double b1 = 0.0, b2 = 0.0, b3 = 0.0; // b = 1 + b1/x + b2/sqrt(x) + b3/cbrt(x)

    double a(double x) const;
    double b(double x) const;
};

// All ten table rows (r major, m minor).
const std::vector<SmallSampleCoefficients>& small_sample_table();

// Throws unsupported_key for r outside {1.35, 1.5} or m outside {10,...,50}.
const SmallSampleCoefficients& small_sample_row(double r, int m);

// Throws numerical_breakdown when b(x) <= 0.
double apply_small_sample(double s, long n, int m, int j_m, double r);

// ---------------------------------------------------------------------------
// Test statistics
// ---------------------------------------------------------------------------

// Translated-binomial statistic, truncated at zero: max(gamma - 2 J_m, 0).
long b_statistic(const DominationResult& dom);

// Untruncated translation gamma - 2 J_m; the lower-tail binomial test works
// on this scale so that segregation evidence is not clipped away.
long b_statistic_untruncated(const DominationResult& dom);

// Standardized mean domination number. Convention: Var(G_bar) = p_r (1 -
// p_r) / J_m, so S = (G_bar - mu) / sqrt(p_r (1 - p_r) / J_m) = sqrt(J_m)
// (G_bar - mu) / sigma with the per-triangle sigma, and S is asymptotically
// standard normal.
double s_statistic(const DominationResult& dom, const NullDistribution& null);

// Corrected statistics per the convex-hull adjustment.
double apply_hull_correction_b(long gamma_total, int j_m, const HullCorrection& hc);
double apply_hull_correction_s(double s, const HullCorrection& hc);

// ---------------------------------------------------------------------------
// Result of a full test run
// ---------------------------------------------------------------------------

struct TestCounts {
    long n = 0;      // |X|
    int m = 0;       // |Y|
    int j_m = 0;
    long n_inside = 0;
    long n_outside = 0;
    int min_n_j = 0;
};

struct TestResult {
    double statistic_raw = 0.0;   // B (truncated) or S, before corrections
    double statistic_final = 0.0; // after requested corrections
    double p_value = 1.0;
    double critical_value = 0.0;
    bool reject = false;
    NullDistribution null_params;
    Alternative alternative = Alternative::segregation;
    Statistic statistic = Statistic::normal;
    double alpha = 0.05;
    std::optional<HullCorrection> hull;
    std::vector<std::string> corrections_applied;
    std::vector<std::string> warnings;
    TestCounts counts;
    DominationResult domination;
};

// Full pipeline: triangulate Y (single-triangle mode when |Y| = 3), build the
// PCD, compute the domination number, the configured statistic, corrections,
// p-value and decision.
TestResult run_test(std::span<const Point2> x_points, std::span<const Point2> y_points,
                    const TestConfig& cfg);

// Same pipeline on a pre-built triangulation.
TestResult run_test(std::span<const Point2> x_points, const Triangulation& tri,
                    const TestConfig& cfg);

// Minimum number of Delaunay triangles for the one-sided level-alpha test to
// reject almost surely in the degenerate limit under an epsilon alternative:
// ceil((sigma z_alpha / (G_limit - mu))^2) with the per-triangle sigma and
// the a.s. limits G = 2 (segregation, eps <= sqrt(3)/4), 1 (segregation,
// larger eps) and 3 (association).
long j_star(double alpha, Alternative alt, double epsilon, const NullDistribution& null);

} // namespace pcd
