#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ivreg/mesh.hpp"
#include "ivreg/param_choice.hpp"
#include "ivreg/types.hpp"

namespace ivreg {

struct Inclusion {
    Rect rect;
    double value = 0.0;
};

/// Piecewise constant exact source: background value overwritten by
/// axis-aligned rectangular inclusions (later entries win on overlap).
struct Phantom {
    std::vector<Inclusion> inclusions;
    double background = 0.0;

    /// max |value| over background and inclusions.
    double rho_dagger() const;
};

/// Four disjoint inclusions of heights +4, -4, +2, -2 on zero background,
/// placed at [-0.7,-0.3]^2, [0.3,0.7]x[-0.7,-0.3], [-0.7,-0.3]x[0.3,0.7]
/// and [0.3,0.7]^2.
Phantom default_phantom();

/// Nodal interpolation of the phantom on the mesh. Inclusion bounds are
/// inclusive. Throws when an inclusion reaches outside the mesh domain.
GridFunction build_phantom(const Mesh& mesh, const Phantom& phantom);

/// Deterministic standard normal stream: Box-Muller transform driven by
/// mt19937_64, so draws are reproducible across platforms for a fixed
/// seed.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed);
    double next();
    Eigen::VectorXd vector(int n);

private:
    double uniform_open();  // (0,1]
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct NoiseSpec {
    double s = 0.0;  ///< relative noise percentage
    std::uint64_t seed = 0;
};

/// Additive noise scaled to the target level: draws eta with i.i.d.
/// standard normal entries and returns
///
///   y_noisy = y_true + (s/100) ||y_true||_inf eta / sqrt(eta' M eta),
///
/// together with the measured noise norm
/// delta = sqrt((y_noisy-y_true)' M (y_noisy-y_true)), which equals
/// (s/100) ||y_true||_inf by construction. s == 0 returns the data
/// unchanged with delta = 0.
std::pair<GridFunction, double> make_noisy_data(const GridFunction& y_true,
                                                const NoiseSpec& spec,
                                                const SparseSymMatrix& M);

/// Subgradient of the supremum norm at u_true: with
/// C = {i : |u_i| >= max|u| - active_tol} and m_C the lumped mass of C,
/// xi_i = sign(u_i)/m_C on C and 0 elsewhere. With the lumped-mass pairing
/// below, sum_i |xi_i| m_i = 1 and <xi, u_true> = max|u| hold exactly.
/// Throws when u_true is empty.
Eigen::VectorXd bregman_subgradient(const GridFunction& u_true,
                                    const SparseSymMatrix& M,
                                    double active_tol = 0.0);

/// Duality pairing <xi, v> = sum_i xi_i m_i v_i with the lumped masses
/// m = M 1.
double dual_pairing(const Eigen::VectorXd& xi, const SparseSymMatrix& M,
                    const Eigen::VectorXd& v);

struct ErrorRecord {
    double s = 0.0;
    double delta = 0.0;        ///< measured noise norm
    double discrepancy = 0.0;  ///< misfit of the selected reconstruction
    double rho_chosen = 0.0;
    double err_inf = 0.0;      ///< ||u - u_true||_inf
    double err_l2 = 0.0;       ///< sqrt((u-u_true)' M (u-u_true))
    double bregman_pair = 0.0; ///< <xi, u - u_true>
    bool success = false;
};

struct ExperimentConfig {
    int nx = 65;  ///< vertices along x
    int ny = 65;  ///< vertices along y
    Rect domain;
    double c = 1.0;
    double tau = 1.1;
    double rho0 = 10.0;
    std::vector<double> noise = {1.0, 0.1, 0.01, 0.001, 0.0001};
    std::uint64_t seed = 1;
    std::string out_dir;  ///< empty: no files written
    Phantom phantom = default_phantom();
    SsnParams ssn;
    int phase_budget = 100;
    bool adaptive_increase = false;
    int verbosity = 0;
    /// Worker threads for the per-noise-level records (each record owns its
    /// generator stream, so results are identical at any thread count).
    /// 0 picks one thread per record up to the hardware; tracing
    /// (verbosity >= 2) forces sequential execution.
    int threads = 0;
};

struct ExperimentResult {
    std::vector<ErrorRecord> records;
    std::vector<ChoiceReport> reports;     ///< one per record
    std::vector<GridFunction> reconstructions;
    GridFunction u_true;
    bool all_succeeded() const;
};

/// Full reconstruction sweep: builds the phantom and exact data once, then
/// for each noise percentage generates seeded noise (stream seed ^ record
/// index), selects rho by the discrepancy principle and computes the error
/// record. When out_dir is set, writes results.csv plus per-record
/// reconstruction grids, continuation traces and JSON reports. Failed
/// records are kept and flagged, they do not abort the sweep.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace ivreg
