#include "ivreg/mesh.hpp"

#include <stdexcept>

namespace ivreg {

double signed_area2(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Mesh build_mesh(int nx, int ny, const Rect& domain) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("build_mesh: need at least 2 vertices per axis");
    }
    if (!domain.nondegenerate()) {
        throw std::invalid_argument("build_mesh: degenerate rectangle");
    }

    Mesh mesh;
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.domain = domain;

    const double hx = domain.width() / (nx - 1);
    const double hy = domain.height() / (ny - 1);

    mesh.vertices.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // endpoints exact, interior nodes uniform
            const double x = (i == nx - 1) ? domain.x1 : domain.x0 + i * hx;
            const double y = (j == ny - 1) ? domain.y1 : domain.y0 + j * hy;
            mesh.vertices.push_back({x, y});
        }
    }

    mesh.triangles.reserve(2u * (nx - 1) * (ny - 1));
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int v00 = mesh.vertex_index(i, j);
            const int v10 = mesh.vertex_index(i + 1, j);
            const int v11 = mesh.vertex_index(i + 1, j + 1);
            const int v01 = mesh.vertex_index(i, j + 1);
            // split along the v00 -> v11 diagonal, both triangles ccw
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

}  // namespace ivreg
