#include "ivreg/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ivreg::io {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    return in;
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

constexpr char kMagic[4] = {'I', 'V', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_grid_csv(std::ostream& out, const Mesh& mesh, const GridFunction& values) {
    if (values.size() != mesh.num_vertices()) {
        throw std::invalid_argument("write_grid_csv: value count does not match mesh");
    }
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        out << fmt(mesh.vertices[i].x) << ',' << fmt(mesh.vertices[i].y) << ','
            << fmt(values[i]) << '\n';
    }
}

void write_grid_csv(const std::string& path, const Mesh& mesh,
                    const GridFunction& values) {
    auto out = open_out(path);
    write_grid_csv(out, mesh, values);
}

GridCsv read_grid_csv(std::istream& in) {
    GridCsv grid;
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        double x = 0, y = 0, v = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3) {
            throw std::runtime_error("read_grid_csv: malformed line: " + line);
        }
        grid.points.push_back({x, y});
        values.push_back(v);
    }
    grid.values = Eigen::Map<Eigen::VectorXd>(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
    return grid;
}

GridCsv read_grid_csv(const std::string& path) {
    auto in = open_in(path);
    return read_grid_csv(in);
}

void write_grid_binary(const std::string& path, const Mesh& mesh,
                       const GridFunction& values) {
    if (values.size() != mesh.num_vertices()) {
        throw std::invalid_argument("write_grid_binary: value count does not match mesh");
    }
    auto out = open_out(path, std::ios::binary);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(mesh.nx));
    put_u32(out, static_cast<std::uint32_t>(mesh.ny));
    put_u64(out, static_cast<std::uint64_t>(values.size()));
    put_f64(out, mesh.domain.x0);
    put_f64(out, mesh.domain.x1);
    put_f64(out, mesh.domain.y0);
    put_f64(out, mesh.domain.y1);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        put_f64(out, values[i]);
    }
}

GridDump read_grid_binary(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("read_grid_binary: bad magic");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw std::runtime_error("read_grid_binary: unsupported version");
    }
    GridDump dump;
    dump.nx = static_cast<int>(get_u32(in));
    dump.ny = static_cast<int>(get_u32(in));
    const std::uint64_t n = get_u64(in);
    dump.domain.x0 = get_f64(in);
    dump.domain.x1 = get_f64(in);
    dump.domain.y0 = get_f64(in);
    dump.domain.y1 = get_f64(in);
    if (n != static_cast<std::uint64_t>(dump.nx) * static_cast<std::uint64_t>(dump.ny)) {
        throw std::runtime_error("read_grid_binary: header sizes inconsistent");
    }
    dump.values.resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        dump.values[static_cast<Eigen::Index>(i)] = get_f64(in);
    }
    if (!in) {
        throw std::runtime_error("read_grid_binary: truncated file");
    }
    return dump;
}

void write_matrix_coo(std::ostream& out, const SparseSymMatrix& mat) {
    for (int k = 0; k < mat.outerSize(); ++k) {
        for (SparseSymMatrix::InnerIterator it(mat, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << fmt(it.value()) << '\n';
        }
    }
}

void write_matrix_coo(const std::string& path, const SparseSymMatrix& mat) {
    auto out = open_out(path);
    write_matrix_coo(out, mat);
}

std::string to_json(const NewtonReport& report) {
    nlohmann::json j;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["final_residual"] = report.final_residual;
    j["termination_reason"] = to_string(report.reason);
    return j.dump(2);
}

std::string to_json(const ChoiceReport& report) {
    nlohmann::json j;
    j["rho_final"] = report.rho_final;
    j["discrepancy_final"] = report.discrepancy_final;
    j["success"] = report.success;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& e : report.trace) {
        trace.push_back({{"phase", static_cast<int>(e.phase)},
                         {"k", e.k},
                         {"rho", e.rho},
                         {"discrepancy", e.discrepancy},
                         {"converged", e.converged}});
    }
    j["trace"] = std::move(trace);
    return j.dump(2);
}

void write_choice_trace_csv(std::ostream& out, const ChoiceReport& report) {
    out << "phase,k,rho,discrepancy,converged\n";
    for (const auto& e : report.trace) {
        out << static_cast<int>(e.phase) << ',' << e.k << ',' << fmt(e.rho) << ','
            << fmt(e.discrepancy) << ',' << (e.converged ? 1 : 0) << '\n';
    }
}

void write_choice_trace_csv(const std::string& path, const ChoiceReport& report) {
    auto out = open_out(path);
    write_choice_trace_csv(out, report);
}

void write_distance_curve_csv(std::ostream& out,
                              const oracle::DistanceCurve& curve) {
    out << "rho,d\n";
    for (Eigen::Index i = 0; i < curve.rho_grid.size(); ++i) {
        out << fmt(curve.rho_grid[i]) << ',' << fmt(curve.d_values[i]) << '\n';
    }
}

void write_distance_curve_csv(const std::string& path,
                              const oracle::DistanceCurve& curve) {
    auto out = open_out(path);
    write_distance_curve_csv(out, curve);
}

void write_results_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
    out << "s,delta,discrepancy,rho,err_inf,err_l2,bregman_pair,success\n";
    for (const auto& r : records) {
        out << fmt(r.s) << ',' << fmt(r.delta) << ',' << fmt(r.discrepancy) << ','
            << fmt(r.rho_chosen) << ',' << fmt(r.err_inf) << ',' << fmt(r.err_l2)
            << ',' << fmt(r.bregman_pair) << ',' << (r.success ? 1 : 0) << '\n';
    }
}

void write_results_csv(const std::string& path,
                       const std::vector<ErrorRecord>& records) {
    auto out = open_out(path);
    write_results_csv(out, records);
}

Phantom read_phantom_json(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    Phantom phantom;
    phantom.background = j.value("background", 0.0);
    for (const auto& item : j.value("inclusions", nlohmann::json::array())) {
        Inclusion inc;
        inc.rect.x0 = item.at("x0").get<double>();
        inc.rect.x1 = item.at("x1").get<double>();
        inc.rect.y0 = item.at("y0").get<double>();
        inc.rect.y1 = item.at("y1").get<double>();
        inc.value = item.at("value").get<double>();
        phantom.inclusions.push_back(inc);
    }
    return phantom;
}

std::string to_json(const Phantom& phantom) {
    nlohmann::json j;
    j["background"] = phantom.background;
    nlohmann::json incs = nlohmann::json::array();
    for (const auto& inc : phantom.inclusions) {
        incs.push_back({{"x0", inc.rect.x0},
                        {"x1", inc.rect.x1},
                        {"y0", inc.rect.y0},
                        {"y1", inc.rect.y1},
                        {"value", inc.value}});
    }
    j["inclusions"] = std::move(incs);
    return j.dump(2);
}

}  // namespace ivreg::io
