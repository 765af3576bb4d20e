#pragma once

#include <Eigen/Dense>

#include "ivreg/operators.hpp"

namespace ivreg::oracle {

/// Small dense box-constrained least-squares instance
/// min ||Au - y||_2 over ||u||_inf <= rho, with A injective.
/// Construction verifies full column rank (smallest singular value > 1e-8)
/// and throws std::invalid_argument otherwise.
struct DenseInstance {
    Eigen::MatrixXd A;
    Eigen::VectorXd y;
    double rho = 0.0;

    DenseInstance(Eigen::MatrixXd A, Eigen::VectorXd y, double rho);
};

struct PgResult {
    Eigen::VectorXd u;
    long iterations = 0;
    bool stagnated = false;  ///< fixed-point residual reached tol
};

/// Projected gradient with the fixed step 1/||A'A||_2, started from zero,
/// iterated until ||u - proj(u - step * grad)||_inf <= tol. Entirely
/// independent of the Newton code path; used as the reference solver.
PgResult pg_solve(const DenseInstance& instance, double tol = 1e-10,
                  long max_iter = 1000000);

struct DistanceCurve {
    Eigen::VectorXd rho_grid;  ///< strictly increasing
    Eigen::VectorXd d_values;  ///< misfit ||A u*(rho) - y||_2
};

/// Evaluates the distance function rho -> min_{||u||_inf<=rho} ||Au - y||_2
/// on a grid. Throws if the grid is empty/not increasing or a solve fails
/// to stagnate.
DistanceCurve distance_curve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& rho_grid, double tol = 1e-10,
                             long max_iter = 1000000);

/// Checks that the minimizer sits on the boundary of the box:
/// ||u*||_inf == rho within 1e-6. Requires the misfit to be positive
/// (d > d_floor); throws std::logic_error when that precondition fails.
bool check_boundary_property(const DenseInstance& instance, double d_floor = 1e-8,
                             double tol = 1e-6);

/// Checks |d(rho,y1) - d(rho,y2)| <= ||y1 - y2||_2 + slack.
bool check_nonexpansive(const Eigen::MatrixXd& A, double rho,
                        const Eigen::VectorXd& y1, const Eigen::VectorXd& y2,
                        double slack = 1e-8);

/// Inverts the distance function by bisection: returns rho with
/// |d(rho,y) - sigma| <= tol. sigma must lie strictly between the
/// unconstrained residual and ||y||_2; throws std::invalid_argument
/// otherwise.
double invert_distance(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                       double sigma, double tol = 1e-6);

/// Dense form of the discrete forward map with the data norm folded in:
/// A = M^{1/2} (K+cM)^{-1} M and y = M^{1/2} y_data, so that
/// ||A u - y||_2 equals the mass-weighted misfit of the grid problem.
/// Computed with dense factorizations, independent of the sparse path.
DenseInstance dense_pde_instance(const EllipticOperator& op,
                                 const GridFunction& y_data, double rho);

}  // namespace ivreg::oracle
