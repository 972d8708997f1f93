#include "nystrom/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include <Eigen/Core>

#include "nystrom/errors.hpp"

namespace nystrom {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown field");
  }
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], indexed(path, i)));
  return out;
}

Eigen::Vector3d as_vector3(const json& j, const std::string& path) {
  const auto v = as_doubles(j, path);
  if (v.size() != 3) throw ConfigError(path, "expected three components");
  return {v[0], v[1], v[2]};
}

Dipole parse_dipole(const json& j, const std::string& path) {
  check_keys(j, path, {"position", "moment"});
  if (!j.contains("position")) throw ConfigError(join(path, "position"), "missing");
  if (!j.contains("moment")) throw ConfigError(join(path, "moment"), "missing");
  return {as_vector3(j["position"], join(path, "position")),
          as_vector3(j["moment"], join(path, "moment"))};
}

std::vector<Formulation> parse_formulations(const json& j, const std::string& path) {
  std::vector<std::string> names;
  if (j.is_string()) {
    names.push_back(j.get<std::string>());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) names.push_back(as_string(j[i], indexed(path, i)));
  } else {
    throw ConfigError(path, "expected a name or a list of names");
  }
  std::vector<Formulation> out;
  for (const auto& name : names) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "all") {
      for (auto f : {Formulation::DL, Formulation::ADL, Formulation::ISADL, Formulation::IADL}) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
      }
      continue;
    }
    try {
      const Formulation f = parse_formulation(lower);
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    } catch (const ValidationError&) {
      throw ConfigError(path, "unknown formulation '" + name + "'");
    }
  }
  if (out.empty()) throw ConfigError(path, "no formulation selected");
  return out;
}

SolverConfig parse_solver(const json& j, const std::string& path) {
  check_keys(j, path,
             {"chi", "near_points", "near_subdivisions", "line_points", "polar_sectors",
              "duffy_subdivisions", "sinh_grading", "jacobian_eps"});
  SolverConfig s;
  if (j.contains("chi")) s.chi = as_double(j["chi"], join(path, "chi"));
  if (j.contains("near_points")) s.near_points = as_int(j["near_points"], join(path, "near_points"));
  if (j.contains("near_subdivisions")) {
    s.near_subdivisions = as_int(j["near_subdivisions"], join(path, "near_subdivisions"));
  }
  if (j.contains("line_points")) s.line_points = as_int(j["line_points"], join(path, "line_points"));
  if (j.contains("polar_sectors")) {
    s.polar_sectors = as_int(j["polar_sectors"], join(path, "polar_sectors"));
  }
  if (j.contains("duffy_subdivisions")) {
    s.duffy_subdivisions = as_int(j["duffy_subdivisions"], join(path, "duffy_subdivisions"));
  }
  if (j.contains("sinh_grading")) s.sinh_grading = as_bool(j["sinh_grading"], join(path, "sinh_grading"));
  if (j.contains("jacobian_eps")) {
    s.jacobian_eps = as_double(j["jacobian_eps"], join(path, "jacobian_eps"));
  }
  return s;
}

void check_order(int order, const std::string& path) {
  if (order < 0 || order > 2) throw ConfigError(path, "order must be 0, 1 or 2");
}

std::string format(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json dipole_json(const Dipole& d) {
  return {{"position", {d.position.x(), d.position.y(), d.position.z()}},
          {"moment", {d.moment.x(), d.moment.y(), d.moment.z()}}};
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "",
             {"model", "h", "order", "dipoles", "dipole", "formulation", "solver", "oracle",
              "sweep", "output", "record_timings"});
  ExperimentConfig cfg;
  cfg.source = j;

  if (!j.contains("model")) throw ConfigError("model", "missing");
  const json& m = j["model"];
  check_keys(m, "model", {"radii", "meshes", "conductivities", "skull_index"});
  if (m.contains("radii")) cfg.radii = as_doubles(m["radii"], "model.radii");
  if (m.contains("meshes")) {
    const json& files = m["meshes"];
    if (!files.is_array() || files.empty()) {
      throw ConfigError("model.meshes", "expected a nonempty list of paths");
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::filesystem::path p = as_string(files[i], indexed("model.meshes", i));
      cfg.mesh_files.push_back(p.is_relative() ? base_dir / p : p);
    }
  }
  if (cfg.radii.empty() && cfg.mesh_files.empty()) {
    throw ConfigError("model", "needs radii or meshes");
  }
  if (!m.contains("conductivities")) throw ConfigError("model.conductivities", "missing");
  cfg.conductivities = as_doubles(m["conductivities"], "model.conductivities");
  const std::size_t layers = cfg.generated() ? cfg.radii.size() : cfg.mesh_files.size();
  if (cfg.conductivities.size() != layers) {
    throw ConfigError("model.conductivities", "expected one value per interface");
  }
  if (!cfg.radii.empty() && cfg.radii.size() != layers) {
    throw ConfigError("model.radii", "expected one radius per mesh");
  }
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    if (!(cfg.radii[i] > 0.0) || (i > 0 && !(cfg.radii[i] > cfg.radii[i - 1]))) {
      throw ConfigError(indexed("model.radii", i), "radii must be positive and increasing");
    }
  }
  for (std::size_t i = 0; i < cfg.conductivities.size(); ++i) {
    if (!(cfg.conductivities[i] > 0.0)) {
      throw ConfigError(indexed("model.conductivities", i), "conductivity must be positive");
    }
  }
  cfg.skull_index = layers >= 2 ? 2 : 0;
  if (m.contains("skull_index")) cfg.skull_index = as_int(m["skull_index"], "model.skull_index");
  if (cfg.skull_index != 0 &&
      (cfg.skull_index < 2 || cfg.skull_index > static_cast<int>(layers))) {
    throw ConfigError("model.skull_index", "must be 0 or in [2, number of interfaces]");
  }

  if (j.contains("h")) {
    if (!cfg.generated()) throw ConfigError("h", "only generated models take a mesh size");
    cfg.h = as_double(j["h"], "h");
  }
  if (cfg.generated() && !(cfg.h > 0.0 && cfg.h < cfg.radii.front())) {
    throw ConfigError("h", "must lie in (0, innermost radius)");
  }
  if (j.contains("order")) cfg.order = as_int(j["order"], "order");
  check_order(cfg.order, "order");

  if (j.contains("dipoles") && j.contains("dipole")) {
    throw ConfigError("dipoles", "give either dipole or dipoles");
  }
  if (j.contains("dipole")) {
    cfg.dipoles.push_back(parse_dipole(j["dipole"], "dipole"));
  } else if (j.contains("dipoles")) {
    const json& list = j["dipoles"];
    if (!list.is_array() || list.empty()) {
      throw ConfigError("dipoles", "expected a nonempty list");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.dipoles.push_back(parse_dipole(list[i], indexed("dipoles", i)));
    }
  } else {
    throw ConfigError("dipole", "missing");
  }

  cfg.formulations = j.contains("formulation")
                         ? parse_formulations(j["formulation"], "formulation")
                         : parse_formulations(json("all"), "formulation");

  if (j.contains("solver")) cfg.solver = parse_solver(j["solver"], "solver");
  try {
    cfg.solver.validate(anchors_for_order(cfg.order));
  } catch (const ValidationError& e) {
    throw ConfigError("solver", e.what());
  }

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    check_keys(o, "oracle", {"max_degree", "tolerance"});
    if (o.contains("max_degree")) {
      cfg.oracle.max_degree = as_int(o["max_degree"], "oracle.max_degree");
    }
    if (o.contains("tolerance")) cfg.oracle.tolerance = as_double(o["tolerance"], "oracle.tolerance");
    if (cfg.oracle.max_degree < 1) throw ConfigError("oracle.max_degree", "must be >= 1");
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, "sweep", {"parameter", "values"});
    if (!s.contains("parameter")) throw ConfigError("sweep.parameter", "missing");
    if (!s.contains("values")) throw ConfigError("sweep.values", "missing");
    SweepSpec sweep;
    sweep.parameter = as_string(s["parameter"], "sweep.parameter");
    sweep.values = as_doubles(s["values"], "sweep.values");
    if (sweep.values.empty()) throw ConfigError("sweep.values", "sweep list is empty");
    const std::set<std::string> known{"h", "order", "sigma2", "ratio", "x0"};
    if (!known.count(sweep.parameter)) {
      throw ConfigError("sweep.parameter", "unknown parameter '" + sweep.parameter + "'");
    }
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
      const double v = sweep.values[i];
      const std::string path = indexed("sweep.values", i);
      if (sweep.parameter == "h") {
        if (!cfg.generated()) throw ConfigError("sweep.parameter", "h needs a generated model");
        if (!(v > 0.0 && v < cfg.radii.front())) {
          throw ConfigError(path, "must lie in (0, innermost radius)");
        }
      } else if (sweep.parameter == "order") {
        if (v != std::floor(v)) throw ConfigError(path, "order must be an integer");
        check_order(static_cast<int>(v), path);
      } else if (sweep.parameter == "sigma2" || sweep.parameter == "ratio") {
        if (cfg.conductivities.size() < 2) {
          throw ConfigError("sweep.parameter", "needs at least two layers");
        }
        if (!(v > 0.0)) throw ConfigError(path, "must be positive");
      } else if (cfg.dipoles.size() != 1) {
        throw ConfigError("sweep.parameter", "x0 sweep needs exactly one dipole");
      }
    }
    cfg.sweep = std::move(sweep);
  }

  if (j.contains("output")) cfg.output = as_string(j["output"], "output");
  if (cfg.output.empty()) throw ConfigError("output", "must not be empty");
  if (j.contains("record_timings")) {
    cfg.record_timings = as_bool(j["record_timings"], "record_timings");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return parse_config(j, path.parent_path());
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  SweepPoint base{cfg.h, cfg.order, cfg.conductivities, cfg.dipoles};
  if (!cfg.sweep) return {base};
  std::vector<SweepPoint> points;
  for (double v : cfg.sweep->values) {
    SweepPoint p = base;
    const std::string& name = cfg.sweep->parameter;
    if (name == "h") {
      p.h = v;
    } else if (name == "order") {
      p.order = static_cast<int>(v);
    } else if (name == "sigma2") {
      p.conductivities[1] = v;
    } else if (name == "ratio") {
      p.conductivities[1] = p.conductivities[0] / v;
    } else {
      p.dipoles[0].position = Point3(v, 0.0, 0.0);
    }
    points.push_back(std::move(p));
  }
  return points;
}

HeadModel build_model(const ExperimentConfig& cfg, const SweepPoint& point) {
  if (cfg.generated()) {
    return make_sphere_head_model(cfg.radii, point.conductivities, cfg.skull_index, point.h);
  }
  std::vector<SurfaceMesh> meshes;
  for (const auto& file : cfg.mesh_files) meshes.push_back(load_mesh(file));
  return HeadModel(std::move(meshes), point.conductivities, cfg.skull_index);
}

Eigen::VectorXd reference_potentials(const ExperimentConfig& cfg, const SweepPoint& point,
                                     const Dipole& dipole,
                                     const std::vector<Observation>& scalp) {
  const LayeredSphereModel sphere{cfg.radii, point.conductivities};
  const double outer = cfg.radii.back();
  Eigen::VectorXd v(static_cast<Eigen::Index>(scalp.size()));
  for (std::size_t k = 0; k < scalp.size(); ++k) {
    const Point3 p = scalp[k].point.normalized() * outer;
    v[static_cast<Eigen::Index>(k)] = analytic_surface_potential(sphere, dipole, p, cfg.oracle);
  }
  return v;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  ExperimentResult result;
  json points = json::array();
  const auto sweep = expand_sweep(cfg);

  for (std::size_t ip = 0; ip < sweep.size(); ++ip) {
    const SweepPoint& pt = sweep[ip];
    json pj;
    pj["index"] = ip;
    pj["h"] = pt.h;
    pj["order"] = pt.order;
    pj["conductivities"] = pt.conductivities;
    json dj = json::array();
    for (const auto& d : pt.dipoles) dj.push_back(dipole_json(d));
    pj["dipoles"] = dj;

    double h_row = pt.h;
    auto make_row = [&](Formulation f, const Dipole& d) {
      ResultRow row;
      row.formulation = f;
      row.order = pt.order;
      row.h = h_row;
      if (pt.conductivities.size() >= 2) row.sigma2 = pt.conductivities[1];
      row.x0 = d.position.x();
      return row;
    };
    auto fail_all = [&](const std::string& message) {
      for (auto f : cfg.formulations) {
        for (const auto& d : pt.dipoles) {
          ResultRow row = make_row(f, d);
          row.error = message;
          result.rows.push_back(std::move(row));
        }
      }
      pj["error"] = message;
      result.any_failed = true;
    };

    if (progress) progress("point " + std::to_string(ip + 1) + "/" + std::to_string(sweep.size()));

    std::optional<HeadModel> model;
    try {
      model.emplace(build_model(cfg, pt));
    } catch (const Error& e) {
      fail_all(e.what());
      points.push_back(pj);
      continue;
    }
    std::vector<int> patches;
    json edges = json::array();
    for (const auto& mesh : model->interfaces()) {
      patches.push_back(mesh.num_patches());
      edges.push_back(mesh.mean_edge_length());
    }
    pj["patches"] = patches;
    pj["mean_edge_length"] = edges;
    if (!cfg.generated()) h_row = model->interfaces().back().mean_edge_length();

    std::optional<Discretization> disc;
    try {
      disc.emplace(*model, pt.order, cfg.solver);
    } catch (const Error& e) {
      fail_all(e.what());
      points.push_back(pj);
      continue;
    }
    const auto scalp = disc->scalp_observations();

    std::vector<Eigen::VectorXd> refs;
    std::optional<std::string> ref_error;
    if (cfg.has_reference()) {
      try {
        for (const auto& d : pt.dipoles) refs.push_back(reference_potentials(cfg, pt, d, scalp));
      } catch (const Error& e) {
        ref_error = e.what();
        pj["reference_error"] = e.what();
      }
    }

    // Shared work first; on failure each formulation is retried alone so one
    // breakdown does not hide the others.
    std::vector<std::pair<Formulation, std::variant<FormulationRun, std::string>>> runs;
    try {
      auto all = run_formulations(*disc, cfg.formulations, pt.dipoles);
      for (std::size_t i = 0; i < all.size(); ++i) {
        runs.emplace_back(cfg.formulations[i], std::move(all[i]));
      }
    } catch (const Error&) {
      runs.clear();
      for (auto f : cfg.formulations) {
        try {
          runs.emplace_back(f, run_formulation(*disc, f, pt.dipoles));
        } catch (const Error& e) {
          runs.emplace_back(f, std::string(e.what()));
        }
      }
    }

    json fj = json::array();
    for (auto& [f, outcome] : runs) {
      json entry;
      entry["formulation"] = to_string(f);
      if (auto* message = std::get_if<std::string>(&outcome)) {
        entry["error"] = *message;
        result.any_failed = true;
        for (const auto& d : pt.dipoles) {
          ResultRow row = make_row(f, d);
          row.patches = patches;
          row.error = *message;
          result.rows.push_back(std::move(row));
        }
        fj.push_back(entry);
        continue;
      }
      const FormulationRun& run = std::get<FormulationRun>(outcome);
      entry["unknowns"] = run.unknowns;
      entry["lu_residual"] = run.residual;
      if (cfg.record_timings) {
        entry["t_assemble_s"] = run.assemble_seconds;
        entry["t_solve_s"] = run.solve_seconds;
      }
      json errs = json::array();
      for (std::size_t id = 0; id < run.solutions.size(); ++id) {
        ResultRow row = make_row(f, pt.dipoles[id]);
        row.patches = patches;
        row.unknowns = run.unknowns;
        row.t_assemble = run.assemble_seconds;
        row.t_solve = run.solve_seconds;
        row.lu_residual = run.residual;
        try {
          const Eigen::VectorXd v = recover_potential(*disc, run.solutions[id], scalp);
          if (!v.allFinite()) throw SingularMatrix(-1);
          if (!refs.empty()) row.rel_error = relative_error(v, refs[id]);
        } catch (const Error& e) {
          row.error = e.what();
          result.any_failed = true;
        }
        if (row.rel_error) {
          errs.push_back(*row.rel_error);
        } else {
          errs.push_back(nullptr);
        }
        result.rows.push_back(std::move(row));
      }
      entry["rel_error"] = errs;
      fj.push_back(entry);
      if (progress) {
        std::string line = "  " + to_string(f) + " Ns=" + std::to_string(run.unknowns);
        if (result.rows.back().rel_error) {
          line += " rel_error=" + format(*result.rows.back().rel_error, 6);
        }
        progress(line);
      }
    }
    if (ref_error) result.any_failed = true;
    pj["formulations"] = fj;
    points.push_back(pj);
  }

  result.sidecar["config"] = cfg.source;
  result.sidecar["points"] = points;
  result.sidecar["csv"] = cfg.output;
  result.sidecar["versions"] = {
      {"nystrom", "1.0.0"},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__}};
  return result;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool record_timings) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << to_string(r.formulation) << ',' << r.order << ',' << format(r.h, 12) << ','
         << (r.sigma2 ? format(*r.sigma2, 12) : "") << ',' << format(r.x0, 12);
    for (int i = 0; i < 3; ++i) {
      line << ',';
      if (i < static_cast<int>(r.patches.size())) line << r.patches[i];
    }
    if (r.error) {
      line << ",,,,,";
    } else {
      line << ',' << r.unknowns << ',' << (r.rel_error ? format(*r.rel_error, 17) : "") << ','
           << format(record_timings ? r.t_assemble : 0.0, 6) << ','
           << format(record_timings ? r.t_solve : 0.0, 6) << ',' << format(r.lu_residual, 6);
    }
    out << line.str() << '\n';
  }
}

}  // namespace nystrom
