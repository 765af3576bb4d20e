#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

using namespace ivreg;

TEST_SUITE_BEGIN("fem");

TEST_CASE("diagonal systems reduce to componentwise division") {
    const int n = 6;
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + i;
        trips.emplace_back(i, i, diag[i]);
    }
    SparseSymMatrix S(n, n);
    S.setFromTriplets(trips.begin(), trips.end());

    std::mt19937 gen(3);
    const Eigen::VectorXd rhs = test_support::random_vector(n, gen);
    const Eigen::VectorXd x = solve_spd(S, rhs);
    CHECK((x - rhs.cwiseQuotient(diag)).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("(K + M) x = M 1 is solved by the constant one vector") {
    const auto problem = test_support::make_problem(9, 9);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(problem.op.size());
    const Eigen::VectorXd x = problem.op.solve_system(problem.M * ones);
    CHECK((x - ones).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("random SPD system matches a dense Cholesky factorization") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd B(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            B(i, j) = dist(gen);
        }
    }
    const Eigen::MatrixXd Sd = B.transpose() * B + Eigen::MatrixXd::Identity(5, 5);
    const Eigen::VectorXd rhs = test_support::random_vector(5, gen);

    SparseSymMatrix S = Sd.sparseView();
    const Eigen::VectorXd x = solve_spd(S, rhs);
    const Eigen::VectorXd x_ref = Sd.llt().solve(rhs);
    CHECK((x - x_ref).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("singular and indefinite systems are rejected") {
    const auto problem = test_support::make_problem(4, 4);

    // K alone is singular (constants in the kernel)
    const Eigen::VectorXd rhs = problem.M * Eigen::VectorXd::Ones(problem.op.size());
    CHECK_THROWS_AS(solve_spd(problem.K, rhs, {1e-12, 200}), SolveError);

    // explicitly indefinite diagonal
    SparseSymMatrix S(2, 2);
    std::vector<Eigen::Triplet<double>> trips{{0, 0, 1.0}, {1, 1, -1.0}};
    S.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd r(2);
    r << 1.0, 1.0;
    CHECK_THROWS_AS(solve_spd(S, r, {1e-12, 50}), SolveError);

    CHECK_THROWS_AS(solve_spd(problem.K, Eigen::VectorXd::Ones(3)),
                    std::invalid_argument);
}

TEST_CASE("forward solve reproduces constants exactly") {
    const auto problem = test_support::make_problem(9, 9, 1.0);
    const int n = problem.op.size();

    const GridFunction y1 = problem.op.forward(Eigen::VectorXd::Ones(n));
    CHECK((y1 - Eigen::VectorXd::Ones(n)).lpNorm<Eigen::Infinity>() <= 1e-10);

    const GridFunction y0 = problem.op.forward(Eigen::VectorXd::Zero(n));
    CHECK(y0.lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("forward solve is linear") {
    const auto problem = test_support::make_problem(7, 6, 1.0);
    std::mt19937 gen(19);
    const int n = problem.op.size();
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd u = test_support::random_vector(n, gen);
        const Eigen::VectorXd v = test_support::random_vector(n, gen);
        const double alpha = test_support::random_vector(1, gen, -2.0, 2.0)[0];
        const double beta = test_support::random_vector(1, gen, -2.0, 2.0)[0];
        const GridFunction combined = problem.op.forward(alpha * u + beta * v);
        const GridFunction separate =
            alpha * problem.op.forward(u) + beta * problem.op.forward(v);
        CHECK((combined - separate).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
}

TEST_CASE("forward map is injective: solve then invert recovers the source") {
    const auto problem = test_support::make_problem(6, 6, 1.0);
    std::mt19937 gen(23);
    const Eigen::VectorXd u = test_support::random_vector(problem.op.size(), gen);
    const GridFunction y = problem.op.forward(u);
    // u = M^{-1} (K + cM) y
    const Eigen::VectorXd recovered =
        solve_spd(problem.M, problem.op.system_matrix() * y);
    CHECK((recovered - u).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("adjoint solve coincides with the forward solve on the same data") {
    const auto problem = test_support::make_problem(5, 8, 1.0);
    std::mt19937 gen(29);
    const Eigen::VectorXd r = test_support::random_vector(problem.op.size(), gen);

    const GridFunction p = problem.op.adjoint(r);
    const GridFunction y = problem.op.forward(r);
    CHECK((p - y).lpNorm<Eigen::Infinity>() == 0.0);

    const GridFunction p0 = problem.op.adjoint(Eigen::VectorXd::Zero(problem.op.size()));
    CHECK(p0.lpNorm<Eigen::Infinity>() <= 1e-14);

    // free-function forms agree with the operator
    const GridFunction pf = adjoint_solve(problem.K, problem.M, 1.0, r);
    CHECK((pf - p).lpNorm<Eigen::Infinity>() <= 1e-12);
}

namespace {

// Nodal error against the separable eigenfunction solution of
// -Laplace(y) + y = u for u = cos(pi x) cos(pi y) on [-1,1]^2.
double eigenfunction_error(int nv) {
    const auto problem = test_support::make_problem(nv, nv, 1.0);
    const int n = problem.op.size();
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) {
        const Point& v = problem.mesh.vertices[i];
        u[i] = std::cos(std::numbers::pi * v.x) * std::cos(std::numbers::pi * v.y);
    }
    const GridFunction y = problem.op.forward(u);
    const double factor = 1.0 / (1.0 + 2.0 * std::numbers::pi * std::numbers::pi);
    return (y - factor * u).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("forward solve converges at second order") {
    const double coarse = eigenfunction_error(33);  // h = 1/16
    const double fine = eigenfunction_error(65);    // h = 1/32
    const double ratio = coarse / fine;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("operator construction rejects a nonpositive shift") {
    const auto problem = test_support::make_problem(3, 3);
    CHECK_THROWS_AS(EllipticOperator(problem.K, problem.M, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(EllipticOperator(problem.K, problem.M, -1.0), std::invalid_argument);

    const auto other = test_support::make_problem(4, 4);
    CHECK_THROWS_AS(EllipticOperator(problem.K, other.M, 1.0), std::invalid_argument);
}

TEST_SUITE_END();
