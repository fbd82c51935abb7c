#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "pcd/errors.hpp"

namespace pcd {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// ---------------------------------------------------------------------------
// Robust predicates.
//
// The fast floating evaluation is trusted only when it clears an error bound
// proportional to the magnitude of the cancelled terms; otherwise the sign is
// recomputed in exact rational arithmetic. Region membership, and hence the
// domination number, must be reproducible, so near-zero determinants never
// depend on rounding.
// ---------------------------------------------------------------------------

// Sign of the signed area of (a,b,c): >0 counterclockwise, <0 clockwise, 0 collinear.
int orient2d_sign(Point2 a, Point2 b, Point2 c);

// Sign of the in-circle determinant for CCW (a,b,c): >0 iff d is strictly
// inside the circumcircle, 0 iff cocircular.
int incircle_sign(Point2 a, Point2 b, Point2 c, Point2 d);

// Twice the signed area, plain floating evaluation.
inline double signed_area2(Point2 a, Point2 b, Point2 c) {
    return cross(b - a, c - a);
}

// ---------------------------------------------------------------------------
// Barycentric coordinates
// ---------------------------------------------------------------------------

inline constexpr double kInsideTol = 1e-12;

struct Barycentric {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;

    double operator[](int i) const { return i == 0 ? b1 : (i == 1 ? b2 : b3); }
    double min() const { return std::fmin(b1, std::fmin(b2, b3)); }
    double max() const { return std::fmax(b1, std::fmax(b2, b3)); }
    bool inside(double tol = kInsideTol) const { return min() >= -tol; }
    bool strictly_inside() const { return b1 > 0.0 && b2 > 0.0 && b3 > 0.0; }
};

// ---------------------------------------------------------------------------
// Triangle, normalized to CCW order starting from the lexicographically
// smallest vertex so that vertex labels (and with them tau-vertex and
// M-region labels) are stable across runs.
// ---------------------------------------------------------------------------

class Triangle {
public:
    Triangle(Point2 a, Point2 b, Point2 c); // throws degenerate_triangle

    const Point2& v(int i) const { return v_[i]; } // i in {0,1,2}
    const std::array<Point2, 3>& vertices() const { return v_; }
    double area() const { return area_; }
    double diameter() const;

    Barycentric barycentric(Point2 p) const;
    Point2 point_at(const Barycentric& b) const {
        return b.b1 * v_[0] + b.b2 * v_[1] + b.b3 * v_[2];
    }
    Point2 centroid() const { return point_at({1.0 / 3, 1.0 / 3, 1.0 / 3}); }
    bool contains(Point2 p, double tol = kInsideTol) const {
        return barycentric(p).inside(tol);
    }

private:
    std::array<Point2, 3> v_;
    double area_;
};

// Standard equilateral triangle T_e = ((0,0),(1,0),(1/2,sqrt(3)/2)).
const Triangle& standard_triangle();

// ---------------------------------------------------------------------------
// Affine map between triangles
// ---------------------------------------------------------------------------

struct AffineMap {
    // p -> L p + t
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    double tx = 0.0, ty = 0.0;

    Point2 operator()(Point2 p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
    AffineMap inverse() const;
    static AffineMap between(const Triangle& from, const Triangle& to);
};

// Affine transform carrying tri onto T_e (vertex i -> T_e vertex i) and back.
// Barycentric coordinates are preserved by construction.
struct EquilateralMap {
    AffineMap forward;
    AffineMap backward;
};
EquilateralMap map_to_equilateral(const Triangle& tri);

// ---------------------------------------------------------------------------
// Center specification and tau vertices
// ---------------------------------------------------------------------------

enum class CenterKind { center_of_mass, tau_vertex, explicit_point };

struct CenterSpec {
    CenterKind kind = CenterKind::center_of_mass;
    int tau_index = 0;             // in {0,1,2} when kind == tau_vertex
    Barycentric weights{};         // when kind == explicit_point

    static CenterSpec mass_center() { return {CenterKind::center_of_mass, 0, {}}; }
    static CenterSpec tau(int i);
    static CenterSpec at(const Barycentric& w); // w strictly positive
};

// Barycentric weights of tau vertex i for expansion r in [1, 3/2]:
// b_i = (2-r)/r, b_j = (r-1)/r for j != i. Yields the 3/2-degenerate
// coincidence t_0 = t_1 = t_2 = centroid-row behaviour exactly.
Barycentric tau_vertex_weights(int i, double r); // throws r_out_of_range

// The three tau vertices as points of T_e.
std::array<Point2, 3> tau_vertices(double r);

// Resolve a center spec to barycentric weights (valid in any triangle).
// Throws m_outside_triangle if the resolved point is not strictly interior
// (tau vertices sit on the boundary at r = 1).
Barycentric resolve_center(const CenterSpec& center, double r);

// Whether weights w lie inside the closed inner triangle of admissible M
// positions for expansion r (all b_i >= (r-1)/r), within tol.
bool in_tau_triangle(const Barycentric& w, double r, double tol = kInsideTol);

// ---------------------------------------------------------------------------
// M-vertex regions
// ---------------------------------------------------------------------------

// Region index i in {0,1,2} such that p lies in R_M(y_i): the intersection,
// within the triangle, of the two closed half-planes bounded by the lines
// through (y_j, M), j != i, containing y_i. Points on a shared boundary go to
// the lowest index.
int vertex_region_of(const Barycentric& m, const Barycentric& p);

// Operation-level wrapper with the precondition checks from the contract.
int vertex_region_of(const Triangle& tri, Point2 m, Point2 p);

// ---------------------------------------------------------------------------
// Convex hull (Andrew monotone chain, exact orientation tests)
// ---------------------------------------------------------------------------

// CCW hull as indices into pts; strictly convex (collinear boundary points
// dropped). Throws collinear_input when all points lie on one line.
std::vector<int> convex_hull_indices(std::span<const Point2> pts);
std::vector<Point2> convex_hull(std::span<const Point2> pts);

double polygon_area(std::span<const Point2> poly);

// Closed point-in-convex-polygon test (poly CCW).
bool point_in_convex_polygon(std::span<const Point2> poly, Point2 p, double tol = kInsideTol);

void require_finite(std::span<const Point2> pts);

} // namespace pcd
