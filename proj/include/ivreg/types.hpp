#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ivreg {

/// Nodal coefficient vector of a continuous piecewise linear function.
/// For the P1 nodal basis the coefficients coincide with the vertex values,
/// so max/min of the function equal max/min of this vector.
using GridFunction = Eigen::VectorXd;

/// Sparse symmetric matrix (stiffness, mass, or a shifted combination).
/// Assembly stores both triangles and guarantees entry(i,j) == entry(j,i)
/// bit for bit.
using SparseSymMatrix = Eigen::SparseMatrix<double>;

}  // namespace ivreg
