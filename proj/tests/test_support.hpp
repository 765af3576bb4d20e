#pragma once

// Shared fixtures and reference implementations for the test suites. The
// reference code here recomputes quantities with dense linear algebra and
// explicit loops, independent of the library's sparse code paths.

#include <random>

#include <Eigen/Dense>

#include "ivreg/assembly.hpp"
#include "ivreg/mesh.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/ssn.hpp"

namespace test_support {

struct Problem {
    ivreg::Mesh mesh;
    ivreg::SparseSymMatrix K;
    ivreg::SparseSymMatrix M;
    ivreg::EllipticOperator op;
};

inline Problem make_problem(int nx, int ny, double c = 1.0,
                            ivreg::Rect domain = ivreg::Rect{}) {
    ivreg::Mesh mesh = ivreg::build_mesh(nx, ny, domain);
    ivreg::SparseSymMatrix K = ivreg::assemble_stiffness(mesh);
    ivreg::SparseSymMatrix M = ivreg::assemble_mass(mesh);
    ivreg::EllipticOperator op(K, M, c);
    return {std::move(mesh), std::move(K), std::move(M), std::move(op)};
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& gen, double lo = -1.0,
                                     double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = dist(gen);
    }
    return v;
}


// Dense reference for the stacked optimality residual, recomputed entry by
// entry from the definition. The complementarity block uses the misfit
// gradient M p.
inline Eigen::VectorXd dense_residual(const ivreg::SsnState& state,
                                      const Eigen::MatrixXd& K,
                                      const Eigen::MatrixXd& M, double c,
                                      const Eigen::VectorXd& y_data) {
    const int n = static_cast<int>(y_data.size());
    const Eigen::MatrixXd L = K + c * M;
    Eigen::VectorXd b(3 * n);
    for (int i = 0; i < n; ++i) {
        double r1 = 0.0;
        double r2 = 0.0;
        double grad = 0.0;
        for (int j = 0; j < n; ++j) {
            r1 += L(i, j) * state.y[j] - M(i, j) * state.u[j];
            r2 += L(i, j) * state.p[j] - M(i, j) * (state.y[j] - y_data[j]);
            grad += M(i, j) * state.p[j];
        }
        b[i] = r1;
        b[n + i] = r2;
        const double v = state.u[i] - grad;
        const double proj = std::min(state.rho, std::max(-state.rho, v));
        b[2 * n + i] = state.u[i] - proj;
    }
    return b;
}

// Dense reference for one Newton step: assembles the full 3N x 3N block
// matrix and solves it with a pivoted LU factorization.
inline Eigen::VectorXd dense_newton_step(const ivreg::SsnState& state,
                                         const Eigen::MatrixXd& K,
                                         const Eigen::MatrixXd& M, double c,
                                         const Eigen::VectorXd& y_data) {
    const int n = static_cast<int>(y_data.size());
    const Eigen::MatrixXd L = K + c * M;
    const Eigen::VectorXd grad = M * state.p;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    B.block(0, 0, n, n) = L;
    B.block(0, 2 * n, n, n) = -M;
    B.block(n, 0, n, n) = -M;
    B.block(n, n, n, n) = L;
    for (int i = 0; i < n; ++i) {
        if (std::abs(state.u[i] - grad[i]) <= state.rho) {
            B.row(2 * n + i).segment(n, n) = M.row(i);
        } else {
            B(2 * n + i, 2 * n + i) = 1.0;
        }
    }
    const Eigen::VectorXd b = dense_residual(state, K, M, c, y_data);
    return Eigen::FullPivLU<Eigen::MatrixXd>(B).solve(-b);
}

}  // namespace test_support
