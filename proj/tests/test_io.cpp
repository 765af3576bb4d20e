#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ivreg/io.hpp"
#include "test_support.hpp"

using namespace ivreg;

namespace {

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("grid CSV round trip preserves coordinates and values") {
    const Mesh mesh = build_mesh(4, 3, Rect{-1.0, 2.0, 0.0, 1.0});
    std::mt19937 gen(3);
    const GridFunction values = test_support::random_vector(mesh.num_vertices(), gen);

    std::stringstream buffer;
    io::write_grid_csv(buffer, mesh, values);
    const io::GridCsv grid = io::read_grid_csv(buffer);

    REQUIRE(grid.values.size() == values.size());
    CHECK((grid.values - values).lpNorm<Eigen::Infinity>() == 0.0);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        CHECK(grid.points[i].x == mesh.vertices[i].x);
        CHECK(grid.points[i].y == mesh.vertices[i].y);
    }
}

TEST_CASE("binary grid round trip is bit exact") {
    const Mesh mesh = build_mesh(5, 7, Rect{});
    std::mt19937 gen(5);
    const GridFunction values =
        test_support::random_vector(mesh.num_vertices(), gen, -1e8, 1e8);

    const std::string path = temp_file("ivreg_grid.bin");
    io::write_grid_binary(path, mesh, values);
    const io::GridDump dump = io::read_grid_binary(path);

    CHECK(dump.nx == mesh.nx);
    CHECK(dump.ny == mesh.ny);
    CHECK(dump.domain.x0 == mesh.domain.x0);
    CHECK(dump.domain.y1 == mesh.domain.y1);
    CHECK((dump.values - values).lpNorm<Eigen::Infinity>() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("binary reader rejects foreign files") {
    const std::string path = temp_file("ivreg_bad.bin");
    {
        std::ofstream out(path, std::ios::binary);
        out << "not a grid dump at all";
    }
    CHECK_THROWS(io::read_grid_binary(path));
    std::remove(path.c_str());
}

TEST_CASE("matrix coordinate dump lists every stored entry") {
    const Mesh mesh = build_mesh(3, 3, Rect{});
    const SparseSymMatrix M = assemble_mass(mesh);

    std::stringstream buffer;
    io::write_matrix_coo(buffer, M);

    int count = 0;
    int i = 0, j = 0;
    double v = 0.0;
    std::string line;
    double total = 0.0;
    while (std::getline(buffer, line)) {
        REQUIRE(std::sscanf(line.c_str(), "%d %d %lf", &i, &j, &v) == 3);
        total += v;
        ++count;
    }
    CHECK(count == M.nonZeros());
    CHECK(total == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("reports serialize to JSON with the expected fields") {
    NewtonReport newton;
    newton.converged = true;
    newton.iterations = 4;
    newton.final_residual = 3e-12;
    newton.reason = SsnTermination::active_sets_stable;
    const std::string nj = io::to_json(newton);
    CHECK(nj.find("\"converged\": true") != std::string::npos);
    CHECK(nj.find("active_sets_stable") != std::string::npos);

    ChoiceReport choice;
    choice.rho_final = 3.5;
    choice.discrepancy_final = 1e-4;
    choice.success = true;
    choice.trace.push_back({ChoicePhase::increase, 0, 10.0, 1e-5, true, 3.5});
    const std::string cj = io::to_json(choice);
    CHECK(cj.find("\"rho_final\": 3.5") != std::string::npos);
    CHECK(cj.find("\"trace\"") != std::string::npos);

    std::stringstream trace;
    io::write_choice_trace_csv(trace, choice);
    std::string header;
    std::getline(trace, header);
    CHECK(header == "phase,k,rho,discrepancy,converged");
}

TEST_CASE("distance curves export as two-column CSV") {
    oracle::DistanceCurve curve;
    curve.rho_grid = Eigen::Vector3d(0.0, 0.5, 1.0);
    curve.d_values = Eigen::Vector3d(2.0, 1.5, 1.25);

    std::stringstream out;
    io::write_distance_curve_csv(out, curve);
    std::string header;
    std::getline(out, header);
    CHECK(header == "rho,d");
    std::string row;
    std::getline(out, row);
    CHECK(row == "0,2");
}

TEST_CASE("results CSV uses the documented layout") {
    std::vector<ErrorRecord> records(1);
    records[0].s = 0.01;
    records[0].delta = 1.3e-5;
    records[0].success = true;

    std::stringstream out;
    io::write_results_csv(out, records);
    std::string header;
    std::getline(out, header);
    CHECK(header == "s,delta,discrepancy,rho,err_inf,err_l2,bregman_pair,success");
    std::string row;
    std::getline(out, row);
    CHECK(row.substr(0, 5) == "0.01,");
    CHECK(row.back() == '1');
}

TEST_CASE("phantom JSON round trip") {
    const Phantom phantom = default_phantom();
    const std::string path = temp_file("ivreg_phantom.json");
    {
        std::ofstream out(path);
        out << io::to_json(phantom);
    }
    const Phantom parsed = io::read_phantom_json(path);
    REQUIRE(parsed.inclusions.size() == phantom.inclusions.size());
    CHECK(parsed.background == phantom.background);
    for (std::size_t i = 0; i < parsed.inclusions.size(); ++i) {
        CHECK(parsed.inclusions[i].value == phantom.inclusions[i].value);
        CHECK(parsed.inclusions[i].rect.x0 == phantom.inclusions[i].rect.x0);
        CHECK(parsed.inclusions[i].rect.y1 == phantom.inclusions[i].rect.y1);
    }
    CHECK(parsed.rho_dagger() == 4.0);
    std::remove(path.c_str());
}

TEST_SUITE_END();
