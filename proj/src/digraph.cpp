#include "pcd/digraph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pcd {

// ---------------------------------------------------------------------------
// BitMatrix
// ---------------------------------------------------------------------------

namespace {

std::uint64_t last_word_mask(int cols) {
    const int rem = cols % 64;
    return rem == 0 ? ~0ull : ((1ull << rem) - 1);
}

} // namespace

bool BitMatrix::row_covers_all(int r) const {
    if (cols_ == 0) return true;
    const std::uint64_t* w = row(r);
    for (int k = 0; k + 1 < words_; ++k)
        if (w[k] != ~0ull) return false;
    return w[words_ - 1] == last_word_mask(cols_);
}

bool BitMatrix::pair_covers_all(int r1, int r2) const {
    if (cols_ == 0) return true;
    const std::uint64_t* a = row(r1);
    const std::uint64_t* b = row(r2);
    for (int k = 0; k + 1 < words_; ++k)
        if ((a[k] | b[k]) != ~0ull) return false;
    return (a[words_ - 1] | b[words_ - 1]) == last_word_mask(cols_);
}

bool BitMatrix::row_subset_of(int r, int s) const {
    const std::uint64_t* a = row(r);
    const std::uint64_t* b = row(s);
    for (int k = 0; k < words_; ++k)
        if (a[k] & ~b[k]) return false;
    return true;
}

bool BitMatrix::row_superset_of_mask(int r, const std::vector<std::uint64_t>& mask) const {
    const std::uint64_t* a = row(r);
    for (int k = 0; k < words_; ++k)
        if (mask[k] & ~a[k]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Local point data
// ---------------------------------------------------------------------------

namespace {

// Height fraction from vertex i, clamped to [0,1] so that points within the
// inside-tolerance band behave as boundary points (closed triangle).
inline double height_from(const Barycentric& b, int i) {
    const double h = 1.0 - b[i];
    return h < 0.0 ? 0.0 : (h > 1.0 ? 1.0 : h);
}

inline double coverage_threshold(double h, const Expansion& r) {
    if (r.is_infinite()) return h > 0.0 ? 1.0 : 0.0;
    const double t = r.finite_value() * h;
    return t > 1.0 ? 1.0 : t;
}

struct LocalData {
    std::vector<Barycentric> bary;
    std::vector<int> region;
    std::vector<double> height;     // h_{v(x)}(x)
    std::vector<double> threshold;  // min(r h, 1)
};

LocalData local_data(std::span<const Barycentric> pts, const Barycentric& m,
                     const Expansion& r) {
    LocalData d;
    const size_t n = pts.size();
    d.bary.assign(pts.begin(), pts.end());
    d.region.resize(n);
    d.height.resize(n);
    d.threshold.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const int v = vertex_region_of(m, pts[i]);
        d.region[i] = v;
        d.height[i] = height_from(pts[i], v);
        d.threshold[i] = coverage_threshold(d.height[i], r);
    }
    return d;
}

} // namespace

bool arc_present(const Triangle& tri, Point2 m, const PcdParams& params, Point2 x, Point2 z) {
    const Barycentric mb = tri.barycentric(m);
    if (!mb.strictly_inside()) fail(errc::m_outside_triangle, "M must be strictly inside");
    const Barycentric xb = tri.barycentric(x);
    const Barycentric zb = tri.barycentric(z);
    if (!xb.inside() || !zb.inside())
        fail(errc::p_outside_triangle, "x and z must lie in the closed triangle");

    const int v = vertex_region_of(mb, xb);
    const double t = coverage_threshold(height_from(xb, v), params.r);
    return height_from(zb, v) <= t;
}

// ---------------------------------------------------------------------------
// Digraph construction
// ---------------------------------------------------------------------------

PcdBuild build_pcd(std::span<const Point2> x_points, const Triangulation& tri,
                   const PcdParams& params) {
    require_finite(x_points);
    const Barycentric m = resolve_center(params.center, params.r.value());

    PcdBuild out;
    out.per_triangle.resize(tri.j_m());
    std::vector<std::vector<Barycentric>> local_bary(tri.j_m());

    std::vector<Triangle> tris;
    tris.reserve(tri.j_m());
    for (int j = 0; j < tri.j_m(); ++j) tris.push_back(tri.triangle(j));

    for (int i = 0; i < static_cast<int>(x_points.size()); ++i) {
        int found = -1;
        Barycentric fb;
        for (int j = 0; j < tri.j_m(); ++j) {
            const Barycentric b = tris[j].barycentric(x_points[i]);
            if (b.inside()) {
                found = j;
                fb = b;
                break; // lowest triangle index wins on shared edges
            }
        }
        if (found < 0) {
            out.outside.push_back(i);
        } else {
            out.per_triangle[found].x_indices.push_back(i);
            local_bary[found].push_back(fb);
        }
    }

    for (int j = 0; j < tri.j_m(); ++j) {
        TriangleDigraph& dg = out.per_triangle[j];
        dg.triangle_index = j;
        const LocalData d = local_data(local_bary[j], m, params.r);
        const int n = dg.n();
        dg.region = d.region;
        dg.height = d.height;
        dg.coverage = BitMatrix(n, n);
        for (int a = 0; a < n; ++a) {
            const int v = d.region[a];
            const double t = d.threshold[a];
            for (int b = 0; b < n; ++b)
                if (height_from(d.bary[b], v) <= t) dg.coverage.set(a, b);
        }
        for (int a = 0; a < n; ++a) {
            const int v = d.region[a];
            if (dg.extremum[v] < 0 || d.height[a] > d.height[dg.extremum[v]]) dg.extremum[v] = a;
        }

        // Edge-extremum domination: X_[i,1]'s row must contain its whole
        // vertex region. Holds exactly for r >= 1; a violation means the
        // predicates are broken, not the data.
        const int words = dg.coverage.words_per_row();
        for (int v = 0; v < 3; ++v) {
            if (dg.extremum[v] < 0) continue;
            std::vector<std::uint64_t> mask(static_cast<size_t>(std::max(words, 1)), 0);
            for (int a = 0; a < n; ++a)
                if (d.region[a] == v) mask[a / 64] |= (1ull << (a % 64));
            if (!dg.coverage.row_superset_of_mask(dg.extremum[v], mask))
                throw std::logic_error("edge extremum fails to dominate its vertex region");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Domination number
// ---------------------------------------------------------------------------

int gamma_triangle(const TriangleDigraph& dg) {
    const int n = dg.n();
    if (n == 0) return 0;
    for (int i = 0; i < n; ++i)
        if (dg.coverage.row_covers_all(i)) return 1;

    // Pareto reduction: a row whose coverage is contained in another row can
    // never be needed in a minimum covering pair. Maintained as a skyline so
    // the scan stays near-linear; for this digraph family at most one maximal
    // row per vertex region survives (ties keep the lower index).
    std::vector<int> maximal;
    for (int i = 0; i < n; ++i) {
        bool dominated = false;
        for (int j : maximal)
            if (dg.coverage.row_subset_of(i, j)) {
                dominated = true;
                break;
            }
        if (dominated) continue;
        std::erase_if(maximal, [&](int j) { return dg.coverage.row_subset_of(j, i); });
        maximal.push_back(i);
    }
    for (size_t a = 0; a < maximal.size(); ++a)
        for (size_t b = a + 1; b < maximal.size(); ++b)
            if (dg.coverage.pair_covers_all(maximal[a], maximal[b])) return 2;
    return 3;
}

int gamma_triangle_unpruned(const TriangleDigraph& dg) {
    const int n = dg.n();
    if (n == 0) return 0;
    for (int i = 0; i < n; ++i)
        if (dg.coverage.row_covers_all(i)) return 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dg.coverage.pair_covers_all(i, j)) return 2;
    return 3;
}

int gamma_brute_force(const TriangleDigraph& dg) {
    const int n = dg.n();
    if (n == 0) return 0;
    if (n > 20) fail(errc::too_large, "brute-force oracle limited to 20 vertices");
    for (int i = 0; i < n; ++i)
        if (dg.coverage.row_covers_all(i)) return 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dg.coverage.pair_covers_all(i, j)) return 2;
    // Size 3 always suffices (the three edge extrema dominate), verified here
    // rather than assumed.
    const int words = dg.coverage.words_per_row();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                bool all = true;
                for (int w = 0; w < words && all; ++w) {
                    std::uint64_t u = dg.coverage.row(i)[w] | dg.coverage.row(j)[w] |
                                      dg.coverage.row(k)[w];
                    std::uint64_t need =
                        (w + 1 < words) ? ~0ull
                                        : (n % 64 == 0 ? ~0ull : ((1ull << (n % 64)) - 1));
                    if ((u & need) != need) all = false;
                }
                if (all) return 3;
            }
    throw std::logic_error("no dominating set of size 3 found; digraph invariant broken");
}

int gamma_of_barycentric(std::span<const Barycentric> pts, const Barycentric& m_weights,
                         const Expansion& r) {
    const size_t n = pts.size();
    if (n == 0) return 0;

    // Per-region edge extrema (max height in region) and global height maxima.
    double ext_h[3] = {-1.0, -1.0, -1.0};
    double hmax[3] = {0.0, 0.0, 0.0};
    for (const Barycentric& b : pts) {
        const int v = vertex_region_of(m_weights, b);
        const double hv = height_from(b, v);
        if (hv > ext_h[v]) ext_h[v] = hv;
        for (int i = 0; i < 3; ++i) {
            const double hi = height_from(b, i);
            if (hi > hmax[i]) hmax[i] = hi;
        }
    }

    double thr[3];
    for (int i = 0; i < 3; ++i)
        thr[i] = ext_h[i] < 0.0 ? -1.0 : coverage_threshold(ext_h[i], r);

    // gamma = 1: some extremum catches the global maximum of its height.
    for (int i = 0; i < 3; ++i)
        if (thr[i] >= 0.0 && hmax[i] <= thr[i]) return 1;

    // gamma = 2: some pair of extrema leaves no point uncovered.
    bool pair_ok[3] = {true, true, true}; // pair (i,j) indexed by the missing k
    for (const Barycentric& b : pts) {
        for (int k = 0; k < 3; ++k) {
            if (!pair_ok[k]) continue;
            const int i = (k + 1) % 3, j = (k + 2) % 3;
            const bool covered = height_from(b, i) <= thr[i] || height_from(b, j) <= thr[j];
            if (!covered) pair_ok[k] = false;
        }
    }
    for (int k = 0; k < 3; ++k)
        if (pair_ok[k]) return 2;
    return 3;
}

int DominationResult::min_n_j() const {
    int mn = std::numeric_limits<int>::max();
    for (const auto& t : per_triangle) mn = std::min(mn, t.n_j);
    return per_triangle.empty() ? 0 : mn;
}

DominationResult domination_from_build(const PcdBuild& build, int j_m) {
    DominationResult res;
    res.j_m = j_m;
    res.n_outside = static_cast<int>(build.outside.size());
    for (const TriangleDigraph& dg : build.per_triangle) {
        const int g = gamma_triangle(dg);
        res.per_triangle.push_back({dg.triangle_index, dg.n(), g});
        res.gamma_total += g;
        res.n_inside += dg.n();
    }
    res.g_bar = j_m > 0 ? static_cast<double>(res.gamma_total) / j_m : 0.0;
    return res;
}

DominationResult domination_number(std::span<const Point2> x_points, const Triangulation& tri,
                                   const PcdParams& params) {
    return domination_from_build(build_pcd(x_points, tri, params), tri.j_m());
}

} // namespace pcd
