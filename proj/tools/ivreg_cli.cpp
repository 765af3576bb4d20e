// Command-line front end: `run` reproduces the full reconstruction sweep,
// `curve` samples the discrepancy rho -> ||A u_rho - y_data||_M for plotting.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ivreg/assembly.hpp"
#include "ivreg/experiment.hpp"
#include "ivreg/io.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/param_choice.hpp"

namespace {

struct MeshArgs {
    int n = 64;
    bool n_is_vertices = false;

    int vertices_per_axis() const { return n_is_vertices ? n : n + 1; }
};

void add_mesh_options(CLI::App* cmd, MeshArgs& args) {
    cmd->add_option("-n,--n", args.n,
                    "Cells per axis (vertices per axis is n+1); use 128 to mirror a "
                    "129x129-vertex grid")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--n-is-vertices", args.n_is_vertices,
                  "Interpret --n as vertices per axis instead of cells");
}

int run_command(const MeshArgs& mesh_args, double c, double tau, double rho0,
                const std::vector<double>& noise, std::uint64_t seed,
                const std::string& out_dir, const std::string& phantom_path,
                int budget, bool adaptive, int verbosity, int threads) {
    ivreg::ExperimentConfig config;
    config.nx = config.ny = mesh_args.vertices_per_axis();
    config.c = c;
    config.tau = tau;
    config.rho0 = rho0;
    config.noise = noise;
    config.seed = seed;
    config.out_dir = out_dir;
    config.phase_budget = budget;
    config.adaptive_increase = adaptive;
    config.verbosity = verbosity;
    config.threads = threads;
    if (!phantom_path.empty()) {
        config.phantom = ivreg::io::read_phantom_json(phantom_path);
    }

    const ivreg::ExperimentResult result = ivreg::run_experiment(config);
    ivreg::io::write_results_csv(std::cout, result.records);
    return result.all_succeeded() ? 0 : 1;
}

int curve_command(const MeshArgs& mesh_args, double c, double s, std::uint64_t seed,
                  double rho_max, int samples, const std::string& out_path,
                  const std::string& phantom_path) {
    const int nv = mesh_args.vertices_per_axis();
    const ivreg::Mesh mesh = ivreg::build_mesh(nv, nv, ivreg::Rect{});
    const ivreg::SparseSymMatrix K = ivreg::assemble_stiffness(mesh);
    const ivreg::SparseSymMatrix M = ivreg::assemble_mass(mesh);
    const ivreg::EllipticOperator op(K, M, c);

    ivreg::Phantom phantom = ivreg::default_phantom();
    if (!phantom_path.empty()) {
        phantom = ivreg::io::read_phantom_json(phantom_path);
    }
    const ivreg::GridFunction u_true = ivreg::build_phantom(mesh, phantom);
    const ivreg::GridFunction y_true = op.forward(u_true);
    const auto [y_data, delta] = ivreg::make_noisy_data(y_true, {s, seed}, M);

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot open " << out_path << "\n";
        return 1;
    }
    out << "rho,discrepancy,converged\n";
    ivreg::SsnParams ssn;
    ivreg::SsnState warm = ivreg::SsnState::zero(op.size(), 0.0);
    for (int i = 0; i < samples; ++i) {
        const double rho = rho_max * i / (samples - 1.0);
        const auto res = ivreg::discrepancy(y_data, rho, warm, op, ssn);
        if (res.report.converged) {
            warm = res.state;
        }
        out << rho << ',' << res.value << ',' << (res.report.converged ? 1 : 0)
            << '\n';
    }
    std::clog << "noise level delta = " << delta << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ivanov regularization of an elliptic inverse source problem"};
    app.require_subcommand(1);

    MeshArgs mesh_args;
    double c = 1.0;
    double tau = 1.1;
    double rho0 = 10.0;
    std::vector<double> noise = {1.0, 0.1, 0.01, 0.001, 0.0001};
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string phantom_path;
    int budget = 100;
    bool adaptive = false;
    int verbosity = 0;
    int threads = 0;

    auto* run = app.add_subcommand(
        "run", "Reconstruct for a list of noise percentages and tabulate errors");
    add_mesh_options(run, mesh_args);
    run->add_option("-c,--c", c, "Potential coefficient")->check(CLI::PositiveNumber);
    run->add_option("--tau", tau, "Discrepancy factor (> 1)");
    run->add_option("--rho0", rho0, "Initial radius and phase-I increment");
    run->add_option("--noise", noise, "Comma-separated noise percentages")
        ->delimiter(',');
    run->add_option("--seed", seed, "Noise seed");
    run->add_option("-o,--out", out_dir, "Output directory");
    run->add_option("--phantom", phantom_path, "Phantom description (JSON)")
        ->check(CLI::ExistingFile);
    run->add_option("--budget", budget, "Max solves per continuation phase");
    run->add_flag("--adaptive-rho", adaptive, "Double the phase-I increment after failures");
    run->add_flag("-v,--verbose", verbosity, "Verbosity (repeat for solver traces)");
    run->add_option("--threads", threads,
                    "Worker threads for the noise records (0 = auto); results do "
                    "not depend on the thread count");

    double curve_s = 0.01;
    double rho_max = 6.0;
    int samples = 61;
    std::string curve_out = "curve.csv";
    auto* curve = app.add_subcommand(
        "curve", "Sample the discrepancy as a function of the radius");
    add_mesh_options(curve, mesh_args);
    curve->add_option("-c,--c", c, "Potential coefficient")->check(CLI::PositiveNumber);
    curve->add_option("-s,--s", curve_s, "Noise percentage");
    curve->add_option("--seed", seed, "Noise seed");
    curve->add_option("--rho-max", rho_max, "Largest radius to sample");
    curve->add_option("--samples", samples, "Number of radius samples")
        ->check(CLI::Range(2, 100000));
    curve->add_option("-o,--out", curve_out, "Output CSV path");
    curve->add_option("--phantom", phantom_path, "Phantom description (JSON)")
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return run_command(mesh_args, c, tau, rho0, noise, seed, out_dir,
                               phantom_path, budget, adaptive, verbosity, threads);
        }
        return curve_command(mesh_args, c, curve_s, seed, rho_max, samples, curve_out,
                             phantom_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}
