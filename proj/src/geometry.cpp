#include "pcd/geometry.hpp"

#include <algorithm>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace pcd {

namespace {

using BigRat = boost::multiprecision::cpp_rational;

BigRat rat(double v) { return BigRat(v); } // doubles are dyadic, conversion is exact

int sign_of(const BigRat& v) { return v.sign(); }

// Error-bound coefficient: anything below eps_guard * magnitude falls back to
// exact arithmetic. 1e-12 is far above the true rounding bound for these
// 2x2 / 4x4 determinants, so the float path never mis-signs.
constexpr double kEpsGuard = 1e-12;

} // namespace

int orient2d_sign(Point2 a, Point2 b, Point2 c) {
    const double detl = (b.x - a.x) * (c.y - a.y);
    const double detr = (b.y - a.y) * (c.x - a.x);
    const double det = detl - detr;
    const double mag = std::fabs(detl) + std::fabs(detr);
    if (std::fabs(det) > kEpsGuard * mag) return det > 0 ? 1 : -1;

    const BigRat ex = (rat(b.x) - rat(a.x)) * (rat(c.y) - rat(a.y)) -
                      (rat(b.y) - rat(a.y)) * (rat(c.x) - rat(a.x));
    return sign_of(ex);
}

int incircle_sign(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double bcdet = bdx * cdy - bdy * cdx;
    const double cadet = cdx * ady - cdy * adx;
    const double abdet = adx * bdy - ady * bdx;

    const double det = alift * bcdet + blift * cadet + clift * abdet;
    const double mag = alift * (std::fabs(bdx * cdy) + std::fabs(bdy * cdx)) +
                       blift * (std::fabs(cdx * ady) + std::fabs(cdy * adx)) +
                       clift * (std::fabs(adx * bdy) + std::fabs(ady * bdx));
    if (std::fabs(det) > kEpsGuard * mag) return det > 0 ? 1 : -1;

    const BigRat radx = rat(a.x) - rat(d.x), rady = rat(a.y) - rat(d.y);
    const BigRat rbdx = rat(b.x) - rat(d.x), rbdy = rat(b.y) - rat(d.y);
    const BigRat rcdx = rat(c.x) - rat(d.x), rcdy = rat(c.y) - rat(d.y);
    const BigRat ex = (radx * radx + rady * rady) * (rbdx * rcdy - rbdy * rcdx) +
                      (rbdx * rbdx + rbdy * rbdy) * (rcdx * rady - rcdy * radx) +
                      (rcdx * rcdx + rcdy * rcdy) * (radx * rbdy - rady * rbdx);
    return sign_of(ex);
}

// ---------------------------------------------------------------------------
// Triangle
// ---------------------------------------------------------------------------

Triangle::Triangle(Point2 a, Point2 b, Point2 c) {
    if (!is_finite(a) || !is_finite(b) || !is_finite(c))
        fail(errc::invalid_argument, "triangle vertex is not finite");
    const int orient = orient2d_sign(a, b, c);
    if (orient == 0) fail(errc::degenerate_triangle, "triangle vertices are collinear");
    if (orient < 0) std::swap(b, c);

    // rotate so the lexicographically smallest vertex comes first
    v_ = {a, b, c};
    int lo = 0;
    for (int i = 1; i < 3; ++i)
        if (lex_less(v_[i], v_[lo])) lo = i;
    std::rotate(v_.begin(), v_.begin() + lo, v_.end());

    area_ = 0.5 * signed_area2(v_[0], v_[1], v_[2]);
    if (!(area_ > 0.0)) fail(errc::degenerate_triangle, "triangle area underflows");
}

double Triangle::diameter() const {
    return std::max({dist(v_[0], v_[1]), dist(v_[1], v_[2]), dist(v_[2], v_[0])});
}

Barycentric Triangle::barycentric(Point2 p) const {
    if (!is_finite(p)) fail(errc::invalid_argument, "point is not finite");
    const double inv = 1.0 / (2.0 * area_);
    const double w1 = signed_area2(p, v_[1], v_[2]) * inv;
    const double w2 = signed_area2(v_[0], p, v_[2]) * inv;
    // force exact sum 1 so downstream height fractions stay in [0,1]
    return {w1, w2, 1.0 - w1 - w2};
}

const Triangle& standard_triangle() {
    static const Triangle te({0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0});
    return te;
}

// ---------------------------------------------------------------------------
// Affine maps
// ---------------------------------------------------------------------------

AffineMap AffineMap::inverse() const {
    const double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det))
        fail(errc::degenerate_triangle, "affine map is singular");
    const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
    return {ia, ib, ic, id, -(ia * tx + ib * ty), -(ic * tx + id * ty)};
}

AffineMap AffineMap::between(const Triangle& from, const Triangle& to) {
    const Point2 u1 = from.v(1) - from.v(0);
    const Point2 u2 = from.v(2) - from.v(0);
    const Point2 w1 = to.v(1) - to.v(0);
    const Point2 w2 = to.v(2) - to.v(0);
    const double det = cross(u1, u2);
    // L = [w1 w2] * [u1 u2]^-1
    const double a = (w1.x * u2.y - w2.x * u1.y) / det;
    const double b = (w2.x * u1.x - w1.x * u2.x) / det;
    const double c = (w1.y * u2.y - w2.y * u1.y) / det;
    const double d = (w2.y * u1.x - w1.y * u2.x) / det;
    AffineMap m{a, b, c, d, 0.0, 0.0};
    const Point2 img = m(from.v(0));
    m.tx = to.v(0).x - img.x;
    m.ty = to.v(0).y - img.y;
    return m;
}

EquilateralMap map_to_equilateral(const Triangle& tri) {
    return {AffineMap::between(tri, standard_triangle()),
            AffineMap::between(standard_triangle(), tri)};
}

// ---------------------------------------------------------------------------
// Centers and tau vertices
// ---------------------------------------------------------------------------

CenterSpec CenterSpec::tau(int i) {
    if (i < 0 || i > 2) fail(errc::invalid_argument, "tau index must be 0, 1 or 2");
    return {CenterKind::tau_vertex, i, {}};
}

CenterSpec CenterSpec::at(const Barycentric& w) {
    if (!(w.strictly_inside()) || !std::isfinite(w.b1 + w.b2 + w.b3) ||
        std::fabs(w.b1 + w.b2 + w.b3 - 1.0) > 1e-9)
        fail(errc::invalid_argument, "explicit center weights must be positive and sum to 1");
    return {CenterKind::explicit_point, 0, w};
}

Barycentric tau_vertex_weights(int i, double r) {
    if (!(r >= 1.0 && r <= 1.5))
        fail(errc::r_out_of_range, "tau vertices exist only for r in [1, 3/2]");
    const double own = (2.0 - r) / r;
    const double other = (r - 1.0) / r;
    Barycentric w{other, other, other};
    (i == 0 ? w.b1 : i == 1 ? w.b2 : w.b3) = own;
    return w;
}

std::array<Point2, 3> tau_vertices(double r) {
    const Triangle& te = standard_triangle();
    return {te.point_at(tau_vertex_weights(0, r)), te.point_at(tau_vertex_weights(1, r)),
            te.point_at(tau_vertex_weights(2, r))};
}

Barycentric resolve_center(const CenterSpec& center, double r) {
    switch (center.kind) {
        case CenterKind::center_of_mass:
            return {1.0 / 3, 1.0 / 3, 1.0 / 3};
        case CenterKind::tau_vertex: {
            Barycentric w = tau_vertex_weights(center.tau_index, r);
            if (!w.strictly_inside())
                fail(errc::m_outside_triangle,
                     "tau vertex lies on the triangle boundary at r = 1");
            return w;
        }
        case CenterKind::explicit_point:
            return center.weights;
    }
    fail(errc::invalid_argument, "bad center kind");
}

bool in_tau_triangle(const Barycentric& w, double r, double tol) {
    if (!(r >= 1.0 && r <= 1.5)) return false;
    const double lo = (r - 1.0) / r;
    return w.b1 >= lo - tol && w.b2 >= lo - tol && w.b3 >= lo - tol;
}

// ---------------------------------------------------------------------------
// Vertex regions
// ---------------------------------------------------------------------------

int vertex_region_of(const Barycentric& m, const Barycentric& p) {
    // f_i = 0 is the cevian line through vertex i and M; the signs of the
    // other two f's locate p relative to the two cevians bounding R_M(y_i).
    // m_0 f_0 + m_1 f_1 + m_2 f_2 == 0, so one of the three tests below
    // always fires; ordered checks give the lowest index on boundaries.
    const double f0 = p.b2 * m.b3 - p.b3 * m.b2;
    const double f1 = p.b3 * m.b1 - p.b1 * m.b3;
    const double f2 = p.b1 * m.b2 - p.b2 * m.b1;
    if (f1 <= 0.0 && f2 >= 0.0) return 0;
    if (f2 <= 0.0 && f0 >= 0.0) return 1;
    return 2;
}

int vertex_region_of(const Triangle& tri, Point2 m, Point2 p) {
    const Barycentric mb = tri.barycentric(m);
    if (!mb.strictly_inside()) fail(errc::m_outside_triangle, "M must be strictly inside");
    const Barycentric pb = tri.barycentric(p);
    if (!pb.inside()) fail(errc::p_outside_triangle, "point lies outside the triangle");
    return vertex_region_of(mb, pb);
}

// ---------------------------------------------------------------------------
// Convex hull
// ---------------------------------------------------------------------------

void require_finite(std::span<const Point2> pts) {
    for (const Point2& p : pts)
        if (!is_finite(p)) fail(errc::invalid_argument, "point is not finite");
}

std::vector<int> convex_hull_indices(std::span<const Point2> pts) {
    require_finite(pts);
    if (pts.size() < 3) fail(errc::collinear_input, "need at least 3 points");

    std::vector<int> order(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return lex_less(pts[i], pts[j]); });

    auto build = [&](auto begin, auto end) {
        std::vector<int> chain;
        for (auto it = begin; it != end; ++it) {
            while (chain.size() >= 2 &&
                   orient2d_sign(pts[chain[chain.size() - 2]], pts[chain.back()], pts[*it]) <= 0)
                chain.pop_back();
            chain.push_back(*it);
        }
        return chain;
    };

    std::vector<int> lower = build(order.begin(), order.end());
    std::vector<int> upper = build(order.rbegin(), order.rend());
    lower.pop_back();
    upper.pop_back();
    lower.insert(lower.end(), upper.begin(), upper.end());
    if (lower.size() < 3) fail(errc::collinear_input, "all points are collinear");
    return lower;
}

std::vector<Point2> convex_hull(std::span<const Point2> pts) {
    std::vector<Point2> hull;
    for (int i : convex_hull_indices(pts)) hull.push_back(pts[i]);
    return hull;
}

double polygon_area(std::span<const Point2> poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        s += cross(a, b);
    }
    return 0.5 * s;
}

bool point_in_convex_polygon(std::span<const Point2> poly, Point2 p, double tol) {
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        const double edge = norm(b - a);
        if (signed_area2(a, b, p) < -tol * std::max(edge, 1.0)) return false;
    }
    return true;
}

} // namespace pcd
