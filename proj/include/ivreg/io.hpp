#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ivreg/experiment.hpp"
#include "ivreg/mesh.hpp"
#include "ivreg/oracle.hpp"
#include "ivreg/param_choice.hpp"
#include "ivreg/ssn.hpp"
#include "ivreg/types.hpp"

namespace ivreg::io {

/// Plain-text grid dump, one vertex per line: x,y,value.
void write_grid_csv(std::ostream& out, const Mesh& mesh, const GridFunction& values);
void write_grid_csv(const std::string& path, const Mesh& mesh,
                    const GridFunction& values);

/// Parses the x,y,value format back; returns coordinates and values.
struct GridCsv {
    std::vector<Point> points;
    GridFunction values;
};
GridCsv read_grid_csv(std::istream& in);
GridCsv read_grid_csv(const std::string& path);

/// Binary grid dump, little-endian:
///   bytes 0..3   magic "IVGF"
///   uint32       format version (1)
///   uint32       nx, uint32 ny
///   uint64       N (number of values)
///   float64 x4   domain x0, x1, y0, y1
///   float64 xN   nodal values
struct GridDump {
    int nx = 0;
    int ny = 0;
    Rect domain;
    GridFunction values;
};
void write_grid_binary(const std::string& path, const Mesh& mesh,
                       const GridFunction& values);
GridDump read_grid_binary(const std::string& path);

/// Coordinate-format text dump "i j value" (0-based), one entry per line.
void write_matrix_coo(std::ostream& out, const SparseSymMatrix& mat);
void write_matrix_coo(const std::string& path, const SparseSymMatrix& mat);

/// JSON records for solver reports.
std::string to_json(const NewtonReport& report);
std::string to_json(const ChoiceReport& report);

/// Continuation trace as CSV with header phase,k,rho,discrepancy,converged.
void write_choice_trace_csv(std::ostream& out, const ChoiceReport& report);
void write_choice_trace_csv(const std::string& path, const ChoiceReport& report);

/// Two-column CSV (rho, d) of a sampled distance function.
void write_distance_curve_csv(std::ostream& out, const oracle::DistanceCurve& curve);
void write_distance_curve_csv(const std::string& path,
                              const oracle::DistanceCurve& curve);

/// Consolidated experiment table with header
/// s,delta,discrepancy,rho,err_inf,err_l2,bregman_pair,success.
void write_results_csv(std::ostream& out, const std::vector<ErrorRecord>& records);
void write_results_csv(const std::string& path,
                       const std::vector<ErrorRecord>& records);

/// Phantom description as JSON ({"background": b, "inclusions":
/// [{"x0":..,"x1":..,"y0":..,"y1":..,"value":..}, ...]}).
Phantom read_phantom_json(const std::string& path);
std::string to_json(const Phantom& phantom);

}  // namespace ivreg::io
