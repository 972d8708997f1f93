#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nystrom/analytic.hpp"
#include "nystrom/dipole.hpp"
#include "nystrom/formulations.hpp"
#include "nystrom/kernels.hpp"

namespace nystrom {

struct SweepSpec {
  /// One of h, order, sigma2, ratio (sigma_1 / sigma_2), x0.
  std::string parameter;
  std::vector<double> values;
};

/// Experiment description. The model is either generated concentric spheres
/// (`radii` set, `mesh_files` empty) or read from one mesh file per interface;
/// `radii` next to mesh files declares them spheres for the analytic reference.
struct ExperimentConfig {
  std::vector<double> radii;
  std::vector<std::filesystem::path> mesh_files;
  std::vector<double> conductivities;
  int skull_index = 2;
  double h = 0.02;
  int order = 2;
  std::vector<Dipole> dipoles;
  std::vector<Formulation> formulations;
  SolverConfig solver;
  SeriesControl oracle{500, 1e-12};
  std::optional<SweepSpec> sweep;
  std::string output = "results.csv";
  bool record_timings = true;
  nlohmann::json source;

  bool generated() const { return mesh_files.empty(); }
  bool has_reference() const { return !radii.empty(); }
};

/// Throws ConfigError naming the offending field. Relative mesh paths are
/// resolved against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Settings of one sweep point.
struct SweepPoint {
  double h = 0.0;
  int order = 2;
  std::vector<double> conductivities;
  std::vector<Dipole> dipoles;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

/// One CSV row: a sweep point, a formulation and a dipole. When `error` is set
/// the numeric results are absent.
struct ResultRow {
  Formulation formulation = Formulation::DL;
  int order = 0;
  double h = 0.0;
  std::optional<double> sigma2;
  double x0 = 0.0;
  std::vector<int> patches;
  int unknowns = 0;
  std::optional<double> rel_error;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  double lu_residual = 0.0;
  std::optional<std::string> error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  nlohmann::json sidecar;
  bool any_failed = false;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every sweep point in order. Solver failures are recorded in the rows and
/// the sidecar; the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

inline constexpr const char* kCsvHeader =
    "formulation,order,h,sigma2,x0,Np1,Np2,Np3,Ns,rel_error,t_assemble_s,t_solve_s,lu_residual";

/// Timings are written as 0 when record_timings is false.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool record_timings);

/// Builds the head model of one sweep point.
HeadModel build_model(const ExperimentConfig& cfg, const SweepPoint& point);

/// Analytic scalp potentials at the radially projected patch centers of the
/// outer interface.
Eigen::VectorXd reference_potentials(const ExperimentConfig& cfg, const SweepPoint& point,
                                     const Dipole& dipole,
                                     const std::vector<Observation>& scalp);

}  // namespace nystrom
