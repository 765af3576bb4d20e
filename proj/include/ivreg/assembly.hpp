#pragma once

#include "ivreg/mesh.hpp"
#include "ivreg/types.hpp"

namespace ivreg {

/// Element stiffness matrix of a P1 triangle, integrated exactly from the
/// constant barycentric gradients. Row/column order follows the vertex order.
Eigen::Matrix3d stiffness_element(const Point& a, const Point& b, const Point& c);

/// Element mass matrix (area/12) * [[2,1,1],[1,2,1],[1,1,2]], exact for P1.
Eigen::Matrix3d mass_element(const Point& a, const Point& b, const Point& c);

/// Global stiffness matrix K, K(i,j) = integral of grad(phi_i).grad(phi_j).
/// Positive semidefinite; constants span the kernel (row sums vanish).
SparseSymMatrix assemble_stiffness(const Mesh& mesh);

/// Global mass matrix M, M(i,j) = integral of phi_i*phi_j. Positive definite
/// with nonnegative entries; 1'M1 equals the domain area.
SparseSymMatrix assemble_mass(const Mesh& mesh);

/// Discrete L2 norm sqrt(v'Mv).
double mass_norm(const SparseSymMatrix& M, const Eigen::VectorXd& v);

}  // namespace ivreg
