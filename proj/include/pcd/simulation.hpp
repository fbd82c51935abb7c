#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcd/delaunay.hpp"
#include "pcd/digraph.hpp"
#include "pcd/distribution.hpp"
#include "pcd/rng.hpp"

namespace pcd {

// ---------------------------------------------------------------------------
// Alternative patterns. epsilon parametrizes how much of each triangle is
// forbidden (segregation) or required (association) around the Y vertices,
// defined in the standard equilateral triangle and transported to every
// Delaunay triangle through barycentric coordinates.
// ---------------------------------------------------------------------------

struct AlternativeSpec {
    enum class Kind { csr, segregation, association };
    Kind kind = Kind::csr;
    double epsilon = 0.0;

    static AlternativeSpec csr() { return {Kind::csr, 0.0}; }
    static AlternativeSpec segregation(double eps);
    static AlternativeSpec association(double eps);
};

const char* pattern_name(AlternativeSpec::Kind k);

// Corner similarity ratio of the excluded (segregation) or occupied
// (association) corner triangles: s = 2 eps / sqrt(3) resp. the association
// level sqrt(3)/3 - eps mapped the same way.
double segregation_corner_ratio(double eps);
double association_corner_ratio(double eps);

// Exact decomposition of the support into barycentric sub-triangles; sampling
// picks a sub-triangle by area and interpolates, so no rejection is needed.
struct BaryTriangle {
    Barycentric a, b, c;
    double area_fraction = 0.0; // relative to the parent triangle
};

struct SupportMesh {
    std::vector<BaryTriangle> tris;
    std::vector<double> cum;     // cumulative area fractions, last == 1
    double area_fraction = 1.0;  // total support area / triangle area
};

SupportMesh alternative_support(const AlternativeSpec& spec);

// Membership predicate for the support (closed, with tolerance).
bool in_support(const AlternativeSpec& spec, const Barycentric& b, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

// Uniform barycentric coordinates via the square-root interpolation
// construction.
Barycentric sample_uniform_bary(Rng& rng);

Barycentric sample_support(const SupportMesh& mesh, Rng& rng);

struct TriangleAreas {
    std::vector<double> cum; // cumulative triangle areas
    double total = 0.0;
};
TriangleAreas triangle_areas(const Triangulation& tri);
int pick_triangle(const TriangleAreas& areas, Rng& rng);

// n points iid uniform on the convex hull: triangle by area, then uniform
// within.
std::vector<Point2> sample_uniform_hull(const Triangulation& tri, int n, Rng& rng);

// n points iid uniform on the pattern support (CSR falls back to the hull).
std::vector<Point2> sample_alternative(const Triangulation& tri, int n,
                                       const AlternativeSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Experiment drivers. All of them derive one RNG substream per replicate from
// (seed, replicate index), so results are bit-identical for a fixed
// (seed, config) regardless of the thread count.
// ---------------------------------------------------------------------------

void parallel_for(int n_items, int threads, const std::function<void(int)>& body);

// Frequencies of gamma = k over Monte Carlo replicates, per (r, n) cell; all
// r values are evaluated on the same sample within a replicate, which also
// checks the pointwise monotonicity gamma(r2) <= gamma(r1) for r1 < r2.
struct FrequencyTable {
    std::vector<double> r_values; // ascending; +inf allowed
    std::vector<int> n_grid;
    int j_m = 1;
    int n_mc = 0;
    std::uint64_t seed = 0;
    AlternativeSpec pattern;
    // counts[ri][ni][g], g in 0..3*j_m
    std::vector<std::vector<std::vector<long>>> counts;
    long monotonicity_violations = 0;

    double fraction(int ri, int ni, int gamma_value) const {
        return static_cast<double>(counts[ri][ni][gamma_value]) / n_mc;
    }
};

FrequencyTable gamma_frequency_experiment(const Triangulation& tri, const CenterSpec& center,
                                          std::span<const double> r_values,
                                          std::span<const int> n_grid,
                                          const AlternativeSpec& pattern, int n_mc,
                                          std::uint64_t seed, int threads = 1);

// Size / power sweep over an r grid at fixed n. Both statistics, both sides.
struct SizePowerConfig {
    CenterSpec center = CenterSpec::tau(0);
    std::vector<double> r_grid;
    AlternativeSpec pattern = AlternativeSpec::csr();
    int n = 1000;
    int n_mc = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int threads = 1;
    QuadratureConfig quad{};
};

struct SizePowerRow {
    double r = 0.0;
    double p_r = 0.0;
    // rejection fractions
    double binom_lower = 0.0, binom_upper = 0.0;
    double norm_lower = 0.0, norm_upper = 0.0;
};

struct SizePowerResult {
    std::vector<SizePowerRow> rows;
    int n = 0, n_mc = 0, j_m = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    long monotonicity_violations = 0;

    static double standard_error(double f, int n_mc);
    // conservative (< .039), nominal, or liberal (> .061) at alpha = .05
    static const char* size_classification(double f);
};

SizePowerResult size_power_experiment(const Triangulation& tri, const SizePowerConfig& cfg);

// Proportion of X outside the convex hull under the both-uniform protocol
// (X and Y iid uniform on the unit square, fresh Y every replicate).
struct PiOutConfig {
    std::vector<int> m_grid{10, 20, 30, 40, 50};
    int n = 500;
    int n_mc = 400;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct PiOutRow {
    int m = 0;
    double pi_out = 0.0;
    double se = 0.0;
    double fitted = 0.0; // 1.7932/m + 1.2229/sqrt(m)
};

std::vector<PiOutRow> pi_out_experiment(const PiOutConfig& cfg);

// Binned counts of the mean domination number per triangle under CSR, the
// plottable form of the normal-approximation histograms.
struct GbarHistogram {
    struct Cell {
        int n = 0;
        double lo = 0.0, hi = 0.0;
        long count = 0;
    };
    std::vector<Cell> cells;
    std::vector<int> n_grid;
    double mean_of(int n) const;
};

GbarHistogram gbar_histogram(const Triangulation& tri, const PcdParams& params,
                             std::span<const int> n_grid, int n_mc, std::uint64_t seed,
                             int bins = 40, int threads = 1);

} // namespace pcd
