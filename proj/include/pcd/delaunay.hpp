#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pcd/geometry.hpp"

namespace pcd {

// Delaunay triangulation of the reference points plus their convex hull.
// Triangles are stored as index triples, CCW, rotated so the vertex with the
// lexicographically smallest coordinates comes first (matching Triangle
// normalization), and the list is sorted; the output is a pure function of
// the input point sequence.
struct Triangulation {
    std::vector<Point2> y_points;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> hull; // CCW hull vertex indices
    std::vector<std::string> warnings;

    int j_m() const { return static_cast<int>(triangles.size()); }
    int m() const { return static_cast<int>(y_points.size()); }

    Triangle triangle(int j) const {
        const auto& t = triangles[j];
        return Triangle(y_points[t[0]], y_points[t[1]], y_points[t[2]]);
    }
    std::vector<Point2> hull_points() const {
        std::vector<Point2> h;
        for (int i : hull) h.push_back(y_points[i]);
        return h;
    }
    double hull_area() const;

    // Index of the lowest-index triangle containing p (closed triangles),
    // or -1 when p lies outside the hull.
    int locate(Point2 p, double tol = kInsideTol) const;
};

// Throws collinear_input / duplicate_points. Cocircular quadruples are
// resolved deterministically (fan from the lowest-index cluster point) and
// reported through Triangulation::warnings.
Triangulation delaunay_triangulate(std::span<const Point2> points);

// Single-triangle "triangulation" for |Y| = 3 inputs and the one-triangle
// analysis mode.
Triangulation single_triangle(std::span<const Point2> points);

} // namespace pcd
