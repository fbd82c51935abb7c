#include "pcd/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pcd {

double Triangulation::hull_area() const {
    std::vector<Point2> h = hull_points();
    return polygon_area(h);
}

int Triangulation::locate(Point2 p, double tol) const {
    for (int j = 0; j < j_m(); ++j) {
        const auto& t = triangles[j];
        const Triangle tri(y_points[t[0]], y_points[t[1]], y_points[t[2]]);
        if (tri.contains(p, tol)) return j;
    }
    return -1;
}

namespace {

// Canonical triple: CCW, rotated so the lexicographically smallest point
// leads. Position k of the triple then matches vertex k of Triangle(...).
std::array<int, 3> canonical_triple(std::span<const Point2> pts, int i, int j, int k) {
    if (orient2d_sign(pts[i], pts[j], pts[k]) < 0) std::swap(j, k);
    std::array<int, 3> t{i, j, k};
    int lo = 0;
    for (int s = 1; s < 3; ++s)
        if (lex_less(pts[t[s]], pts[t[lo]])) lo = s;
    std::rotate(t.begin(), t.begin() + lo, t.end());
    return t;
}

// Fan triangulation of a cocircular cluster from its lowest-index point;
// returns the accepted triples. Points are ordered by angle around the
// cluster's circumcenter.
std::vector<std::array<int, 3>> fan_cluster(std::span<const Point2> pts,
                                            std::vector<int> cluster) {
    // circumcenter from the first three points (all cluster members are
    // cocircular, any non-degenerate triple gives the same circle)
    const Point2 a = pts[cluster[0]], b = pts[cluster[1]], c = pts[cluster[2]];
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double ux = ((a.x * a.x + a.y * a.y) * (b.y - c.y) +
                       (b.x * b.x + b.y * b.y) * (c.y - a.y) +
                       (c.x * c.x + c.y * c.y) * (a.y - b.y)) / d;
    const double uy = ((a.x * a.x + a.y * a.y) * (c.x - b.x) +
                       (b.x * b.x + b.y * b.y) * (a.x - c.x) +
                       (c.x * c.x + c.y * c.y) * (b.x - a.x)) / d;

    const int v0 = *std::min_element(cluster.begin(), cluster.end());
    std::vector<int> rest;
    for (int i : cluster)
        if (i != v0) rest.push_back(i);
    const double a0 = std::atan2(pts[v0].y - uy, pts[v0].x - ux);
    std::sort(rest.begin(), rest.end(), [&](int i, int j) {
        auto key = [&](int v) {
            double t = std::atan2(pts[v].y - uy, pts[v].x - ux) - a0;
            if (t < 0) t += 2.0 * M_PI;
            return t;
        };
        return key(i) < key(j);
    });

    std::vector<std::array<int, 3>> out;
    for (size_t s = 0; s + 1 < rest.size(); ++s)
        out.push_back(canonical_triple(pts, v0, rest[s], rest[s + 1]));
    return out;
}

} // namespace

Triangulation delaunay_triangulate(std::span<const Point2> points) {
    require_finite(points);
    const int m = static_cast<int>(points.size());
    if (m < 3) fail(errc::collinear_input, "need at least 3 reference points");

    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (dist(points[i], points[j]) < 1e-12)
                fail(errc::duplicate_points, "coincident reference points");

    Triangulation tri;
    tri.y_points.assign(points.begin(), points.end());
    tri.hull = convex_hull_indices(points); // throws collinear_input if degenerate

    // Definitional construction: a triple is Delaunay iff it is non-degenerate
    // and no other point lies strictly inside its circumcircle. Exact
    // predicates make the strict test unambiguous; cocircular clusters (the
    // zero case) are re-triangulated by a fixed fan rule below. The input
    // sizes here are reference-point counts (tens), so the O(m^3) triple scan
    // with early exit is well within budget.
    std::set<std::array<int, 3>> accepted;
    std::set<std::vector<int>> clusters;
    bool cocircular_seen = false;

    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (int k = j + 1; k < m; ++k) {
                int a = i, b = j, c = k;
                const int orient = orient2d_sign(points[a], points[b], points[c]);
                if (orient == 0) continue;
                if (orient < 0) std::swap(b, c);

                bool empty = true;
                std::vector<int> on_circle;
                for (int l = 0; l < m && empty; ++l) {
                    if (l == i || l == j || l == k) continue;
                    const int s = incircle_sign(points[a], points[b], points[c], points[l]);
                    if (s > 0) empty = false;
                    else if (s == 0) on_circle.push_back(l);
                }
                if (!empty) continue;

                if (on_circle.empty()) {
                    accepted.insert(canonical_triple(points, a, b, c));
                } else {
                    cocircular_seen = true;
                    std::vector<int> cluster = {i, j, k};
                    cluster.insert(cluster.end(), on_circle.begin(), on_circle.end());
                    std::sort(cluster.begin(), cluster.end());
                    clusters.insert(cluster);
                }
            }
        }
    }

    for (const auto& cluster : clusters)
        for (const auto& t : fan_cluster(points, cluster)) accepted.insert(t);

    if (cocircular_seen)
        tri.warnings.push_back(
            "CocircularAmbiguity: four or more cocircular reference points; "
            "tie broken by lowest-index fan");

    tri.triangles.assign(accepted.begin(), accepted.end());
    std::sort(tri.triangles.begin(), tri.triangles.end());

    if (tri.triangles.empty()) fail(errc::collinear_input, "no valid triangle found");
    return tri;
}

Triangulation single_triangle(std::span<const Point2> points) {
    if (points.size() != 3) fail(errc::invalid_argument, "single_triangle needs exactly 3 points");
    return delaunay_triangulate(points);
}

} // namespace pcd
