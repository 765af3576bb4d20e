#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ivreg/operators.hpp"
#include "ivreg/types.hpp"

namespace ivreg {

/// Iterate of the damped semismooth Newton method: state y, adjoint p and
/// control u, together with the radius rho of the box constraint
/// ||u||_inf <= rho.
struct SsnState {
    GridFunction y;
    GridFunction p;
    GridFunction u;
    double rho = 0.0;

    static SsnState zero(int n, double rho);
};

/// Partition of the node indices by the sign pattern of u - p relative to
/// the box: a_plus where u_i - p_i > rho, a_minus where u_i - p_i < -rho,
/// inactive where |u_i - p_i| <= rho. Ties on the boundary count as
/// inactive. The Newton iteration partitions with the misfit gradient Mp
/// in place of p.
struct ActiveSets {
    std::vector<int> a_plus;
    std::vector<int> a_minus;
    std::vector<int> inactive;

    /// True when both bound sets match (the inactive set then matches too).
    bool same_bounds(const ActiveSets& other) const {
        return a_plus == other.a_plus && a_minus == other.a_minus;
    }
};

enum class SsnTermination {
    active_sets_stable,
    residual_below_tol,
    max_iterations,
    line_search_failure,
    linear_solve_failure,
};

const char* to_string(SsnTermination reason);

struct NewtonReport {
    bool converged = false;
    int iterations = 0;  ///< accepted Newton updates
    double final_residual = 0.0;
    SsnTermination reason = SsnTermination::max_iterations;
    std::vector<double> residual_history;  ///< ||b|| at each outer iteration
    int rescue_steps = 0;        ///< full steps taken without residual decrease
    std::vector<char> step_kinds;  ///< per accepted step: 'n' damped, 'r' rescue
};

struct SsnParams {
    double q = 0.7;             ///< backtracking ratio, step sizes q^(i-1)
    int max_line_search = 10;   ///< trial steps per outer iteration
    int max_iterations = 30;    ///< outer iteration budget
    double tol = 1e-9;          ///< residual norm tolerance
    bool mass_weighted_norm = false;  ///< use sqrt(b_j'M b_j) blocks instead of ||b||_2
    /// When no damped trial decreases the residual, take the full Newton
    /// step anyway (the active-set iterate). Without it the monotone line
    /// search stalls at bound crossings: the residual decrease windows
    /// there are narrower than the coarsest trial grid, and crossing the
    /// breakpoints one by one needs O(N) iterations. Disable to get the
    /// strict backtracking that fails with line_search_failure instead.
    bool rescue_full_step = true;
    std::ostream* trace = nullptr;    ///< per-iteration log when non-null
};

/// Componentwise clamp of v onto [-rho, rho]. Requires rho >= 0.
Eigen::VectorXd project_box(const Eigen::VectorXd& v, double rho);

ActiveSets compute_active_sets(const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                               double rho);

/// Stacked residual of the discrete optimality system,
///
///   b = [ (K+cM)y - Mu ; (K+cM)p - M(y - y_data) ; u - proj(u - Mp) ],
///
/// which vanishes exactly at the constrained minimizer of ||A u - y_data||_M
/// over the box: Mp is the gradient of the misfit, with the adjoint state p
/// as its Riesz representative in the discrete L2 inner product.
Eigen::VectorXd newton_residual(const SsnState& state, const EllipticOperator& op,
                                const GridFunction& y_data);

struct NewtonStep {
    Eigen::VectorXd dy;
    Eigen::VectorXd dp;
    Eigen::VectorXd du;
};

/// Reusable factorization state for repeated Newton solves against one
/// operator: the 3N x 3N block pattern and its fill-reducing ordering are
/// computed once, each step pays only the numeric factorization. Not
/// shareable across threads.
class NewtonWorkspace {
public:
    explicit NewtonWorkspace(const EllipticOperator& op);
    ~NewtonWorkspace();
    NewtonWorkspace(NewtonWorkspace&&) noexcept;
    NewtonWorkspace& operator=(NewtonWorkspace&&) noexcept;

    std::optional<NewtonStep> step(const SsnState& state, const ActiveSets& sets,
                                   const GridFunction& y_data);

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

/// One semismooth Newton step: solves the 3N x 3N block system
///
///   [ K+cM       O          -M     ] [dy]
///   [  -M      K+cM          O     ] [dp]  =  -b,
///   [   O    diag(X_I) M  diag(X_A)] [du]
///
/// where the last row is the generalized derivative of u - proj(u - Mp):
/// it forces the misfit gradient M(p + dp) to vanish on the inactive rows
/// and u + du = +-rho on the active sets. Returns nullopt when the system
/// is singular to working precision.
std::optional<NewtonStep> newton_step(const SsnState& state, const ActiveSets& sets,
                                      const EllipticOperator& op,
                                      const GridFunction& y_data);

/// Damped semismooth Newton iteration. Each outer iteration computes the
/// active sets and the residual b; the method stops successfully when
/// ||b|| < tol (reported as active_sets_stable when the bound sets also
/// repeated, since with damping an unchanged partition alone does not
/// certify a solution). Otherwise the Newton step is damped by
/// backtracking with step sizes q^(i-1) until the residual norm decreases;
/// when no trial decreases it, the full step is taken as a rescue (see
/// SsnParams::rescue_full_step). A singular step system or exhausting
/// max_iterations ends the iteration unsuccessfully.
///
/// Residual norms decrease strictly across damped steps, and the result is
/// a deterministic function of the inputs.
std::pair<SsnState, NewtonReport> ssn_solve(const GridFunction& y_data, double rho,
                                            const SsnState& start,
                                            const SsnParams& params,
                                            const EllipticOperator& op,
                                            NewtonWorkspace* workspace = nullptr);

}  // namespace ivreg
