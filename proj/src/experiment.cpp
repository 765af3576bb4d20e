#include "ivreg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ivreg/assembly.hpp"
#include "ivreg/io.hpp"
#include "ivreg/operators.hpp"

namespace ivreg {

double Phantom::rho_dagger() const {
    double r = std::abs(background);
    for (const auto& inc : inclusions) {
        r = std::max(r, std::abs(inc.value));
    }
    return r;
}

Phantom default_phantom() {
    Phantom phantom;
    phantom.background = 0.0;
    phantom.inclusions = {
        {{-0.7, -0.3, -0.7, -0.3}, 4.0},
        {{0.3, 0.7, -0.7, -0.3}, -4.0},
        {{-0.7, -0.3, 0.3, 0.7}, 2.0},
        {{0.3, 0.7, 0.3, 0.7}, -2.0},
    };
    return phantom;
}

GridFunction build_phantom(const Mesh& mesh, const Phantom& phantom) {
    for (const auto& inc : phantom.inclusions) {
        if (inc.rect.x0 > inc.rect.x1 || inc.rect.y0 > inc.rect.y1) {
            throw std::invalid_argument("build_phantom: empty inclusion rectangle");
        }
        if (!mesh.domain.contains(inc.rect)) {
            throw std::invalid_argument("build_phantom: inclusion outside the domain");
        }
    }
    GridFunction u(mesh.num_vertices());
    for (int k = 0; k < mesh.num_vertices(); ++k) {
        const Point& v = mesh.vertices[k];
        double value = phantom.background;
        for (const auto& inc : phantom.inclusions) {
            if (inc.rect.contains(v.x, v.y)) {
                value = inc.value;
            }
        }
        u[k] = value;
    }
    return u;
}

GaussianSampler::GaussianSampler(std::uint64_t seed) : gen_(seed) {}

double GaussianSampler::uniform_open() {
    // 53 uniform bits mapped to (0,1], so log() below is always finite.
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

Eigen::VectorXd GaussianSampler::vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = next();
    }
    return v;
}

std::pair<GridFunction, double> make_noisy_data(const GridFunction& y_true,
                                                const NoiseSpec& spec,
                                                const SparseSymMatrix& M) {
    if (spec.s < 0.0) {
        throw std::invalid_argument("make_noisy_data: negative noise percentage");
    }
    if (spec.s == 0.0) {
        return {y_true, 0.0};
    }
    GaussianSampler sampler(spec.seed);
    const int n = static_cast<int>(y_true.size());
    Eigen::VectorXd eta = sampler.vector(n);
    double eta_norm = mass_norm(M, eta);
    while (eta_norm == 0.0) {  // probability zero, redraw
        eta = sampler.vector(n);
        eta_norm = mass_norm(M, eta);
    }
    const double level = (spec.s / 100.0) * y_true.lpNorm<Eigen::Infinity>();
    const GridFunction y_noisy = y_true + (level / eta_norm) * eta;
    return {y_noisy, mass_norm(M, y_noisy - y_true)};
}

Eigen::VectorXd bregman_subgradient(const GridFunction& u_true,
                                    const SparseSymMatrix& M, double active_tol) {
    if (u_true.size() == 0) {
        throw std::invalid_argument("bregman_subgradient: empty input");
    }
    if (u_true.size() != M.rows()) {
        throw std::invalid_argument("bregman_subgradient: size mismatch");
    }
    const double rho = u_true.lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd lumped = M * Eigen::VectorXd::Ones(M.cols());

    double active_mass = 0.0;
    for (int i = 0; i < u_true.size(); ++i) {
        if (std::abs(u_true[i]) >= rho - active_tol) {
            active_mass += lumped[i];
        }
    }
    if (active_mass <= 0.0) {
        throw std::invalid_argument("bregman_subgradient: empty active set");
    }

    Eigen::VectorXd xi = Eigen::VectorXd::Zero(u_true.size());
    for (int i = 0; i < u_true.size(); ++i) {
        if (std::abs(u_true[i]) >= rho - active_tol) {
            xi[i] = (u_true[i] > 0.0 ? 1.0 : (u_true[i] < 0.0 ? -1.0 : 0.0)) / active_mass;
        }
    }
    return xi;
}

double dual_pairing(const Eigen::VectorXd& xi, const SparseSymMatrix& M,
                    const Eigen::VectorXd& v) {
    // Lumped-mass quadrature, matching the normalization of the
    // subgradient: <xi, u> = max|u| and sum |xi_i| m_i = 1 hold exactly for
    // piecewise constant sources. The consistent matrix would smear the
    // inclusion boundaries and break both identities.
    const Eigen::VectorXd lumped = M * Eigen::VectorXd::Ones(M.cols());
    return xi.dot(lumped.asDiagonal() * v);
}

bool ExperimentResult::all_succeeded() const {
    for (const auto& r : records) {
        if (!r.success) {
            return false;
        }
    }
    return true;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const Mesh mesh = build_mesh(config.nx, config.ny, config.domain);
    const SparseSymMatrix K = assemble_stiffness(mesh);
    const SparseSymMatrix M = assemble_mass(mesh);
    const EllipticOperator op(K, M, config.c);

    ExperimentResult result;
    result.u_true = build_phantom(mesh, config.phantom);
    const GridFunction y_true = op.forward(result.u_true);
    const Eigen::VectorXd xi = bregman_subgradient(result.u_true, M);

    const int n_records = static_cast<int>(config.noise.size());
    result.records.resize(n_records);
    result.reports.resize(n_records);
    result.reconstructions.resize(n_records);

    auto solve_record = [&](int r, const EllipticOperator& record_op) {
        const double s = config.noise[r];
        const auto [y_data, delta] = make_noisy_data(
            y_true, {s, config.seed ^ static_cast<std::uint64_t>(r)}, M);

        ChoiceParams choice;
        choice.tau = config.tau;
        choice.rho0 = config.rho0;
        choice.delta = delta;
        choice.ssn = config.ssn;
        // The misfit inherits the Newton tolerance through the inverse of
        // the mass matrix, so the band [delta, tau*delta] is only decided
        // reliably when the residual is resolved well below delta.
        if (delta > 0.0) {
            choice.ssn.tol =
                std::min(config.ssn.tol, std::max(1e-13, 1e-6 * delta));
        }
        choice.phase_budget = config.phase_budget;
        choice.adaptive_increase = config.adaptive_increase;
        if (config.verbosity >= 2) {
            choice.ssn.trace = &std::clog;
        }

        auto [state, report] = choose_rho(y_data, choice, record_op);

        ErrorRecord rec;
        rec.s = s;
        rec.delta = delta;
        rec.discrepancy = report.discrepancy_final;
        rec.rho_chosen = report.rho_final;
        rec.err_inf = (state.u - result.u_true).lpNorm<Eigen::Infinity>();
        rec.err_l2 = mass_norm(M, state.u - result.u_true);
        rec.bregman_pair = dual_pairing(xi, M, state.u - result.u_true);
        rec.success = report.success;

        result.records[r] = rec;
        result.reports[r] = std::move(report);
        result.reconstructions[r] = std::move(state.u);
    };

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::max(
                                           1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n_records);
    if (config.verbosity >= 2) {
        threads = 1;  // keep the solver trace readable
    }

    if (threads <= 1) {
        for (int r = 0; r < n_records; ++r) {
            solve_record(r, op);
        }
    } else {
        // Records are independent (each owns its noise stream); workers get
        // their own factorization so no solver state is shared.
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                const EllipticOperator worker_op(K, M, config.c);
                for (int r = next.fetch_add(1); r < n_records;
                     r = next.fetch_add(1)) {
                    solve_record(r, worker_op);
                }
            });
        }
        for (auto& worker : pool) {
            worker.join();
        }
    }

    if (config.verbosity >= 1) {
        for (const auto& rec : result.records) {
            std::clog << "s=" << rec.s << " delta=" << rec.delta
                      << " rho=" << rec.rho_chosen << " d=" << rec.discrepancy
                      << " err_inf=" << rec.err_inf
                      << (rec.success ? "" : "  [failed]") << "\n";
        }
    }

    const bool write = !config.out_dir.empty();
    if (write) {
        std::filesystem::create_directories(config.out_dir);
        io::write_grid_csv(config.out_dir + "/phantom.csv", mesh, result.u_true);
        for (int r = 0; r < n_records; ++r) {
            const std::string tag = std::to_string(r);
            io::write_grid_csv(config.out_dir + "/reconstruction_" + tag + ".csv",
                               mesh, result.reconstructions[r]);
            io::write_choice_trace_csv(config.out_dir + "/trace_" + tag + ".csv",
                                       result.reports[r]);
            std::ofstream json(config.out_dir + "/report_" + tag + ".json");
            json << io::to_json(result.reports[r]) << "\n";
        }
        io::write_results_csv(config.out_dir + "/results.csv", result.records);
    }
    return result;
}

}  // namespace ivreg
