#pragma once

#include <array>
#include <vector>

namespace ivreg {

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = -1.0;
    double x1 = 1.0;
    double y0 = -1.0;
    double y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool nondegenerate() const { return x1 > x0 && y1 > y0; }
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform triangulation of a rectangle: every cell of the nx-1 by ny-1
/// tensor grid is split into two right triangles along the diagonal from
/// its lower-left to its upper-right corner.
///
/// Vertices are ordered row-major with x running fastest; triangles are
/// counterclockwise and have positive signed area.
struct Mesh {
    int nx = 0;  ///< vertices along x
    int ny = 0;  ///< vertices along y
    Rect domain;
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    double hx() const { return domain.width() / (nx - 1); }
    double hy() const { return domain.height() / (ny - 1); }
    int vertex_index(int i, int j) const { return j * nx + i; }
};

/// Builds the uniform triangulation. Requires nx, ny >= 2 and a
/// nondegenerate rectangle; throws std::invalid_argument otherwise.
Mesh build_mesh(int nx, int ny, const Rect& domain);

/// Twice the signed area of a triangle (positive for ccw orientation).
double signed_area2(const Point& a, const Point& b, const Point& c);

}  // namespace ivreg
