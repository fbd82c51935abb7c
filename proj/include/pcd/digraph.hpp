#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcd/delaunay.hpp"
#include "pcd/geometry.hpp"

namespace pcd {

// Expansion parameter r in [1, inf]; infinity is a distinguished value, not a
// float sentinel.
class Expansion {
public:
    explicit Expansion(double r) : r_(r) {
        if (!(r >= 1.0) || std::isnan(r)) fail(errc::invalid_argument, "expansion r must be >= 1");
        if (std::isinf(r)) { infinite_ = true; r_ = 0.0; }
    }
    static Expansion infinite() {
        Expansion e(1.0);
        e.infinite_ = true;
        e.r_ = 0.0;
        return e;
    }
    bool is_infinite() const { return infinite_; }
    double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : r_; }
    double finite_value() const {
        if (infinite_) fail(errc::invalid_argument, "r is infinite");
        return r_;
    }

private:
    double r_;
    bool infinite_ = false;
};

struct PcdParams {
    Expansion r{1.5};
    CenterSpec center = CenterSpec::mass_center();
};

// ---------------------------------------------------------------------------
// Row-major bit matrix for arc coverage sets.
// ---------------------------------------------------------------------------

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), words_(cols <= 0 ? 1 : (cols + 63) / 64),
          bits_(static_cast<size_t>(rows_) * words_, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return words_; }

    void set(int r, int c) { bits_[static_cast<size_t>(r) * words_ + c / 64] |= (1ull << (c % 64)); }
    bool get(int r, int c) const {
        return (bits_[static_cast<size_t>(r) * words_ + c / 64] >> (c % 64)) & 1u;
    }
    const std::uint64_t* row(int r) const { return bits_.data() + static_cast<size_t>(r) * words_; }
    std::uint64_t* row(int r) { return bits_.data() + static_cast<size_t>(r) * words_; }

    bool row_covers_all(int r) const;
    bool pair_covers_all(int r1, int r2) const;
    bool row_subset_of(int r, int s) const; // row r subset of row s
    bool row_superset_of_mask(int r, const std::vector<std::uint64_t>& mask) const;

private:
    int rows_ = 0, cols_ = 0, words_ = 1;
    std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------------------
// Per-triangle digraph
// ---------------------------------------------------------------------------

struct TriangleDigraph {
    int triangle_index = -1;
    std::vector<int> x_indices;      // indices into the global X array
    BitMatrix coverage;              // bit j of row i <=> arc (x_i, x_j), loops included
    std::vector<int> region;         // v(x) in {0,1,2} per local point
    std::vector<double> height;      // h_{v(x)}(x) per local point
    std::array<int, 3> extremum{-1, -1, -1}; // local index of X_[i,1] per region

    int n() const { return static_cast<int>(x_indices.size()); }
};

struct PcdBuild {
    std::vector<TriangleDigraph> per_triangle; // one per Delaunay triangle, in order
    std::vector<int> outside;                  // X indices outside the hull
};

// Whether z lies in the proportional-edge proximity region of x. Closed
// regions throughout: the test is h(z) <= min(r h(x), 1) with h the height
// fraction from x's region vertex.
bool arc_present(const Triangle& tri, Point2 m, const PcdParams& params, Point2 x, Point2 z);

// Assigns every X point to exactly one triangle (lowest index on shared
// edges) or to the outside list, and materializes the per-triangle coverage
// bitsets. The center spec is resolved as barycentric weights, i.e. in the
// standard equilateral triangle and pulled back through the affine
// correspondence.
PcdBuild build_pcd(std::span<const Point2> x_points, const Triangulation& tri,
                   const PcdParams& params);

// Exact domination number of one triangle digraph: 0 for empty, else 1 if a
// row covers everything, 2 if a pair of rows does (pair scan over
// Pareto-maximal rows), else 3.
int gamma_triangle(const TriangleDigraph& dg);

// Same pair scan without the Pareto reduction (test cross-check).
int gamma_triangle_unpruned(const TriangleDigraph& dg);

// Exhaustive oracle over subsets of size <= 3; n <= 20 guard.
int gamma_brute_force(const TriangleDigraph& dg);

// ---------------------------------------------------------------------------
// O(n) domination number from barycentric samples; this is the hot path for
// the Monte Carlo sweeps. Agrees with gamma_triangle on every instance (the
// optimal dominating set can always be rebuilt from the three per-region edge
// extrema, whose coverage rows are supersets of every other row in their
// region).
// ---------------------------------------------------------------------------

int gamma_of_barycentric(std::span<const Barycentric> pts, const Barycentric& m_weights,
                         const Expansion& r);

// ---------------------------------------------------------------------------
// Aggregated result
// ---------------------------------------------------------------------------

struct DominationResult {
    struct PerTriangle {
        int tri = 0;
        int n_j = 0;
        int gamma = 0;
    };
    std::vector<PerTriangle> per_triangle;
    long gamma_total = 0;
    double g_bar = 0.0; // gamma_total / j_m
    int j_m = 0;
    int n_inside = 0;
    int n_outside = 0;

    int min_n_j() const;
};

DominationResult domination_number(std::span<const Point2> x_points, const Triangulation& tri,
                                   const PcdParams& params);

DominationResult domination_from_build(const PcdBuild& build, int j_m);

} // namespace pcd
