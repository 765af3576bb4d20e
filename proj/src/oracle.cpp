#include "ivreg/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ivreg/ssn.hpp"

namespace ivreg::oracle {

DenseInstance::DenseInstance(Eigen::MatrixXd A_, Eigen::VectorXd y_, double rho_)
    : A(std::move(A_)), y(std::move(y_)), rho(rho_) {
    if (A.rows() < A.cols() || A.cols() == 0) {
        throw std::invalid_argument("DenseInstance: A must be tall (m >= n >= 1)");
    }
    if (y.size() != A.rows()) {
        throw std::invalid_argument("DenseInstance: y length must match rows of A");
    }
    if (rho < 0.0) {
        throw std::invalid_argument("DenseInstance: negative radius");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    if (svd.singularValues().minCoeff() <= 1e-8) {
        throw std::invalid_argument("DenseInstance: A is not injective");
    }
}

PgResult pg_solve(const DenseInstance& instance, double tol, long max_iter) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("pg_solve: tol must be positive");
    }
    const Eigen::MatrixXd gram = instance.A.transpose() * instance.A;
    const Eigen::VectorXd aty = instance.A.transpose() * instance.y;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(instance.A);
    const double sigma_max = svd.singularValues()(0);
    const double step = 1.0 / (sigma_max * sigma_max);

    PgResult result;
    result.u = Eigen::VectorXd::Zero(instance.A.cols());
    for (long it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd grad = gram * result.u - aty;
        const Eigen::VectorXd next = project_box(result.u - step * grad, instance.rho);
        result.iterations = it;
        if ((result.u - next).lpNorm<Eigen::Infinity>() <= tol) {
            result.stagnated = true;
            return result;
        }
        result.u = next;
    }
    result.stagnated = false;
    return result;
}

namespace {

double distance_at(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double rho,
                   double tol, long max_iter) {
    const PgResult res = pg_solve(DenseInstance(A, y, rho), tol, max_iter);
    if (!res.stagnated) {
        throw std::runtime_error("distance evaluation did not stagnate");
    }
    return (A * res.u - y).norm();
}

}  // namespace

DistanceCurve distance_curve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& rho_grid, double tol,
                             long max_iter) {
    if (rho_grid.size() == 0) {
        throw std::invalid_argument("distance_curve: empty grid");
    }
    for (int i = 1; i < rho_grid.size(); ++i) {
        if (rho_grid[i] <= rho_grid[i - 1]) {
            throw std::invalid_argument("distance_curve: grid must be increasing");
        }
    }
    DistanceCurve curve;
    curve.rho_grid = rho_grid;
    curve.d_values.resize(rho_grid.size());
    for (int i = 0; i < rho_grid.size(); ++i) {
        curve.d_values[i] = distance_at(A, y, rho_grid[i], tol, max_iter);
    }
    return curve;
}

bool check_boundary_property(const DenseInstance& instance, double d_floor,
                             double tol) {
    const PgResult res = pg_solve(instance);
    if (!res.stagnated) {
        throw std::runtime_error("check_boundary_property: solve did not stagnate");
    }
    const double d = (instance.A * res.u - instance.y).norm();
    if (d <= d_floor) {
        throw std::logic_error(
            "check_boundary_property: misfit vanishes, boundary property does not apply");
    }
    return std::abs(res.u.lpNorm<Eigen::Infinity>() - instance.rho) <= tol;
}

bool check_nonexpansive(const Eigen::MatrixXd& A, double rho,
                        const Eigen::VectorXd& y1, const Eigen::VectorXd& y2,
                        double slack) {
    const double d1 = distance_at(A, y1, rho, 1e-10, 1000000);
    const double d2 = distance_at(A, y2, rho, 1e-10, 1000000);
    return std::abs(d1 - d2) <= (y1 - y2).norm() + slack;
}

double invert_distance(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                       double sigma, double tol) {
    const Eigen::VectorXd u_ls = A.colPivHouseholderQr().solve(y);
    const double residual_min = (A * u_ls - y).norm();
    const double d0 = y.norm();
    if (!(sigma > residual_min && sigma < d0)) {
        throw std::invalid_argument("invert_distance: sigma outside attainable range");
    }

    // d is continuous and strictly decreasing between d(0) = ||y|| and the
    // unconstrained residual, reached at rho = ||u_ls||_inf.
    double lo = 0.0;
    double hi = u_ls.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = distance_at(A, y, mid, 1e-10, 1000000);
        if (std::abs(d - sigma) <= tol) {
            return mid;
        }
        if (d > sigma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("invert_distance: bisection did not converge");
}

DenseInstance dense_pde_instance(const EllipticOperator& op,
                                 const GridFunction& y_data, double rho) {
    const Eigen::MatrixXd mass(op.mass());
    const Eigen::MatrixXd system(op.system_matrix());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mass);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw std::runtime_error("dense_pde_instance: mass matrix not SPD");
    }
    const Eigen::MatrixXd mass_sqrt = es.operatorSqrt();
    const Eigen::MatrixXd forward = system.llt().solve(mass);  // (K+cM)^{-1} M
    return DenseInstance(mass_sqrt * forward, mass_sqrt * y_data, rho);
}

}  // namespace ivreg::oracle
