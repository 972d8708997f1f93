#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "nystrom/errors.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/mesh.hpp"

namespace fs = std::filesystem;
using namespace nystrom;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string(), "cannot write output file");
  out << text;
}

int run_solve(const std::string& config_path, int threads, const std::string& out_dir) {
  set_threads(threads);
  const ExperimentConfig cfg = load_config(config_path);
  const ExperimentResult result =
      run_experiment(cfg, [](const std::string& line) { std::cerr << line << '\n'; });

  const fs::path csv = fs::path(out_dir) / cfg.output;
  std::ostringstream text;
  write_csv(result.rows, text, cfg.record_timings);
  write_file(csv, text.str());
  fs::path sidecar = csv;
  sidecar.replace_extension(".json");
  write_file(sidecar, result.sidecar.dump(2) + "\n");
  std::cerr << "wrote " << csv.string() << " and " << sidecar.string() << '\n';
  return result.any_failed ? kNumerical : kOk;
}

int run_oracle(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  if (!cfg.has_reference()) throw ConfigError("model.radii", "the oracle needs a sphere model");
  std::ostringstream text;
  text << "point,dipole,x,y,z,potential\n";
  const auto points = expand_sweep(cfg);
  for (std::size_t ip = 0; ip < points.size(); ++ip) {
    const HeadModel model = build_model(cfg, points[ip]);
    const SurfaceMesh& scalp = model.interfaces().back();
    std::vector<Observation> obs;
    for (int p = 0; p < scalp.num_patches(); ++p) obs.push_back(observation_at(scalp.center(p)));
    for (std::size_t id = 0; id < points[ip].dipoles.size(); ++id) {
      const auto v = reference_potentials(cfg, points[ip], points[ip].dipoles[id], obs);
      for (std::size_t k = 0; k < obs.size(); ++k) {
        const Point3 r = obs[k].point.normalized() * cfg.radii.back();
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", ip, id, r.x(), r.y(),
                      r.z(), v[static_cast<Eigen::Index>(k)]);
        text << buf;
      }
    }
  }
  const fs::path out = fs::path(out_dir) / "oracle.csv";
  write_file(out, text.str());
  std::cerr << "wrote " << out.string() << '\n';
  return kOk;
}

int run_mesh_gen(double radius, double h, int interface_index, const std::string& out) {
  if (!(radius > 0.0)) throw ConfigError("--radius", "must be positive");
  if (!(h > 0.0 && h < radius)) throw ConfigError("--h", "must lie in (0, radius)");
  const SurfaceMesh mesh = generate_sphere_mesh(radius, h, interface_index);
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  save_mesh(mesh, out);
  std::printf("%d patches, %d nodes, mean edge %.6g m\n", mesh.num_patches(), mesh.num_nodes(),
              mesh.mean_edge_length());
  return kOk;
}

int run_mesh_check(const std::string& path) {
  const SurfaceMesh mesh = load_mesh(path);
  std::printf("ok: %d patches, %d nodes, mean edge %.6g m, area %.9g m^2, volume %.9g m^3\n",
              mesh.num_patches(), mesh.num_nodes(), mesh.mean_edge_length(),
              surface_area(mesh), enclosed_volume(mesh));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom boundary element solver for the EEG forward problem"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int threads = 0;
  auto* solve = app.add_subcommand("solve", "Run an experiment config");
  solve->add_option("--config", config_path, "Experiment config (JSON)")->required();
  solve->add_option("--threads", threads, "Worker threads for assembly")->check(CLI::PositiveNumber);
  solve->add_option("--out", out_dir, "Output directory");

  auto* oracle = app.add_subcommand("oracle", "Analytic scalp potentials only");
  oracle->add_option("--config", config_path, "Experiment config (JSON)")->required();
  oracle->add_option("--out", out_dir, "Output directory");

  auto* mesh = app.add_subcommand("mesh", "Sphere mesh tools");
  mesh->require_subcommand(1);
  double radius = 0.0, h = 0.0;
  int interface_index = 1;
  std::string mesh_out, mesh_in;
  auto* gen = mesh->add_subcommand("gen", "Generate a sphere mesh");
  gen->set_help_flag("--help", "Print this help message and exit");
  gen->add_option("--radius", radius, "Sphere radius, m")->required();
  gen->add_option("--h", h, "Target mean edge length, m")->required();
  gen->add_option("--interface", interface_index, "Interface index stored in the file");
  gen->add_option("--out", mesh_out, "Mesh file")->required();
  auto* check = mesh->add_subcommand("check", "Validate a mesh file");
  check->add_option("file", mesh_in, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return run_solve(config_path, threads, out_dir);
    if (*oracle) return run_oracle(config_path, out_dir);
    if (*gen) return run_mesh_gen(radius, h, interface_index, mesh_out);
    if (*check) return run_mesh_check(mesh_in);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
