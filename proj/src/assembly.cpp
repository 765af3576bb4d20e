#include "ivreg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ivreg {

Eigen::Matrix3d stiffness_element(const Point& a, const Point& b, const Point& c) {
    // Gradients of the barycentric basis are constant:
    // grad(lambda_i) = (b_i, c_i) / (2T) with the classic edge coefficients.
    const double area2 = signed_area2(a, b, c);
    const double bcoef[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
    const double ccoef[3] = {c.x - b.x, a.x - c.x, b.x - a.x};
    Eigen::Matrix3d ke;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = (bcoef[i] * bcoef[j] + ccoef[i] * ccoef[j]) / (2.0 * area2);
            ke(i, j) = v;
            ke(j, i) = v;
        }
    }
    return ke;
}

Eigen::Matrix3d mass_element(const Point& a, const Point& b, const Point& c) {
    const double area = 0.5 * signed_area2(a, b, c);
    Eigen::Matrix3d me;
    me << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return (area / 12.0) * me;
}

namespace {

using ElementMatrix = Eigen::Matrix3d (*)(const Point&, const Point&, const Point&);

// Accumulates element contributions into a sparse matrix. Duplicates are
// merged in element order after a stable sort, so the (i,j) and (j,i) sums
// see identical values in identical order and the result is exactly
// symmetric.
SparseSymMatrix assemble(const Mesh& mesh, ElementMatrix element) {
    const int n = mesh.num_vertices();
    if (n == 0) {
        throw std::invalid_argument("assemble: empty mesh");
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(9u * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const Eigen::Matrix3d ke = element(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                           mesh.vertices[tri[2]]);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(tri[i], tri[j], ke(i, j));
            }
        }
    }

    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const auto& s, const auto& t) {
                         return s.col() != t.col() ? s.col() < t.col()
                                                   : s.row() < t.row();
                     });

    std::vector<Eigen::Triplet<double>> merged;
    merged.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (!merged.empty() && merged.back().row() == t.row() &&
            merged.back().col() == t.col()) {
            merged.back() = {t.row(), t.col(), merged.back().value() + t.value()};
        } else {
            merged.push_back(t);
        }
    }

    SparseSymMatrix mat(n, n);
    mat.setFromTriplets(merged.begin(), merged.end());
    mat.makeCompressed();
    return mat;
}

}  // namespace

SparseSymMatrix assemble_stiffness(const Mesh& mesh) {
    return assemble(mesh, stiffness_element);
}

SparseSymMatrix assemble_mass(const Mesh& mesh) {
    return assemble(mesh, mass_element);
}

double mass_norm(const SparseSymMatrix& M, const Eigen::VectorXd& v) {
    const double q = v.dot(M * v);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

}  // namespace ivreg
