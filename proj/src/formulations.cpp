#include "nystrom/formulations.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <optional>
#include <string>

#include "nystrom/errors.hpp"

namespace nystrom {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> interface_range(int first, int last) {
  std::vector<int> ids;
  for (int i = first; i <= last; ++i) ids.push_back(i);
  return ids;
}

int require_skull(const HeadModel& model) {
  const int k = model.skull_index();
  if (k < 2) throw ValidationError("ISADL needs a skull index K >= 2");
  return k;
}

double sigma_tilde(const HeadModel& model, int i) {
  // Isolated model: zero conductivity outside S_{K-1}.
  return i >= model.skull_index() ? 0.0 : model.sigma(i);
}

}  // namespace

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::DL:
      return "dl";
    case Formulation::ADL:
      return "adl";
    case Formulation::ISADL:
      return "isadl";
    case Formulation::IADL:
      return "iadl";
  }
  return "?";
}

Formulation parse_formulation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dl") return Formulation::DL;
  if (lower == "adl") return Formulation::ADL;
  if (lower == "isadl") return Formulation::ISADL;
  if (lower == "iadl") return Formulation::IADL;
  throw ValidationError("unknown formulation '" + std::string(name) + "'");
}

std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::V:
      return "V";
    case DensityKind::Xi:
      return "xi";
    case DensityKind::VIsa:
      return "V_ISA";
    case DensityKind::VCorr:
      return "V_corr";
    case DensityKind::JInner:
      return "J_inner";
    case DensityKind::JOuter:
      return "J_outer";
  }
  return "?";
}

DofMap::DofMap(const HeadModel& model, int anchors, std::vector<int> interfaces)
    : anchors_(anchors), interfaces_(std::move(interfaces)) {
  for (int i : interfaces_) {
    if (i < 1 || i > model.layers()) throw ValidationError("interface index out of range");
    offsets_.push_back(size_);
    patches_.push_back(model.interface(i).num_patches());
    size_ += anchors_ * patches_.back();
  }
}

bool DofMap::contains(int interface) const {
  return std::find(interfaces_.begin(), interfaces_.end(), interface) != interfaces_.end();
}

int DofMap::offset(int interface) const {
  const auto it = std::find(interfaces_.begin(), interfaces_.end(), interface);
  if (it == interfaces_.end()) throw ValidationError("interface not in dof map");
  return offsets_[it - interfaces_.begin()];
}

int DofMap::block_size(int interface) const {
  const auto it = std::find(interfaces_.begin(), interfaces_.end(), interface);
  if (it == interfaces_.end()) throw ValidationError("interface not in dof map");
  return anchors_ * patches_[it - interfaces_.begin()];
}

DofMap::Dof DofMap::dof(int k) const {
  std::size_t block = interfaces_.size() - 1;
  while (offsets_[block] > k) --block;
  const int local = k - offsets_[block];
  return {interfaces_[block], local / anchors_, local % anchors_};
}

double SurfaceDensity::value_at(const SurfaceMesh& mesh, const InterpolationRule& rule,
                                int patch, double alpha, double beta) const {
  const int base = dofs.index(mesh.interface_index(), patch, 0);
  const double jac = mesh.frame(patch, alpha, beta).jacobian;
  return coefficients.segment(base, rule.size()).dot(rule.evaluate(alpha, beta)) / jac;
}

Discretization::Discretization(const HeadModel& model, int order, const SolverConfig& cfg)
    : model_(&model), cfg_(cfg), rule_(order) {
  integrator_ = std::make_unique<PatchIntegrator>(rule_, cfg_);
  surfaces_.reserve(model.layers());
  for (int i = 1; i <= model.layers(); ++i) {
    surfaces_.emplace_back(model.interface(i), rule_, integrator_->near_rule(), cfg_.jacobian_eps);
  }
}

DofMap Discretization::dofs(const std::vector<int>& interfaces) const {
  return DofMap(*model_, rule_.size(), interfaces);
}

DofMap Discretization::all_dofs() const { return dofs(interface_range(1, model_->layers())); }

std::vector<Observation> Discretization::anchor_observations(const DofMap& dofs) const {
  std::vector<Observation> obs;
  obs.reserve(dofs.size());
  for (int i : dofs.interfaces()) {
    const SurfaceMesh& mesh = model_->interface(i);
    for (int p = 0; p < mesh.num_patches(); ++p) {
      for (int a = 0; a < rule_.size(); ++a) {
        obs.push_back(observation_on(mesh, p, rule_.anchor(a).x(), rule_.anchor(a).y()));
      }
    }
  }
  return obs;
}

std::vector<Observation> Discretization::scalp_observations() const {
  const SurfaceMesh& mesh = model_->interface(model_->layers());
  std::vector<Observation> obs;
  obs.reserve(mesh.num_patches());
  for (int p = 0; p < mesh.num_patches(); ++p) {
    obs.push_back(observation_on(mesh, p, 1.0 / 3.0, 1.0 / 3.0));
  }
  return obs;
}

DenseMatrix assemble_operator(const Discretization& disc, KernelKind kind, const DofMap& rows,
                              const DofMap& cols, const std::function<double(int)>& diag,
                              const std::function<double(int)>& weight) {
  const std::vector<Observation> obs = disc.anchor_observations(rows);
  const int na = disc.rule().size();
  std::vector<double> w;
  for (int i : cols.interfaces()) w.push_back(weight(i));
  std::vector<double> c;
  for (int j : rows.interfaces()) c.push_back(cols.contains(j) ? diag(j) : 0.0);

  DenseMatrix z = DenseMatrix::Zero(rows.size(), cols.size());
  const PatchIntegrator& integrator = disc.integrator();
  const int n_rows = rows.size();
#pragma omp parallel
  {
    BasisValues v(na);
#pragma omp for schedule(dynamic, 8)
    for (int r = 0; r < n_rows; ++r) {
      const Observation& o = obs[r];
      for (std::size_t ci = 0; ci < cols.interfaces().size(); ++ci) {
        if (w[ci] == 0.0) continue;
        const int i = cols.interfaces()[ci];
        const SourceSurface& src = disc.surface(i);
        const int base = cols.offset(i);
        for (int p = 0; p < src.num_patches(); ++p) {
          integrator.integrate(kind, src, o, p, v);
          z.row(r).segment(base + p * na, na) = w[ci] * v.transpose();
        }
      }
      const DofMap::Dof d = rows.dof(r);
      const std::size_t ri = std::find(rows.interfaces().begin(), rows.interfaces().end(),
                                       d.interface) -
                             rows.interfaces().begin();
      if (cols.contains(d.interface) && c[ri] != 0.0) {
        const double jac = disc.surface(d.interface).anchor_jacobians()[d.patch * na + d.anchor];
        z(r, cols.index(d.interface, d.patch, d.anchor)) += c[ri] / jac;
      }
    }
  }
  return z;
}

Vector apply_operator(const Discretization& disc, KernelKind kind,
                      const std::vector<Observation>& obs, const SurfaceDensity& density,
                      const std::function<double(int)>& weight) {
  const int na = disc.rule().size();
  const int n = static_cast<int>(obs.size());
  Vector out = Vector::Zero(n);
  std::vector<double> w;
  for (int i : density.dofs.interfaces()) w.push_back(weight(i));
  const PatchIntegrator& integrator = disc.integrator();
#pragma omp parallel
  {
    BasisValues v(na);
#pragma omp for schedule(dynamic, 8)
    for (int r = 0; r < n; ++r) {
      double sum = 0.0;
      for (std::size_t ci = 0; ci < w.size(); ++ci) {
        if (w[ci] == 0.0) continue;
        const int i = density.dofs.interfaces()[ci];
        const SourceSurface& src = disc.surface(i);
        const int base = density.dofs.offset(i);
        double part = 0.0;
        for (int p = 0; p < src.num_patches(); ++p) {
          integrator.integrate(kind, src, obs[r], p, v);
          part += v.dot(density.coefficients.segment(base + p * na, na));
        }
        sum += w[ci] * part;
      }
      out[r] = sum;
    }
  }
  return out;
}

DenseMatrix dl_matrix(const Discretization& disc) {
  const HeadModel& m = disc.model();
  const DofMap dofs = disc.all_dofs();
  return assemble_operator(
      disc, KernelKind::DoubleLayerSource, dofs, dofs,
      [&](int j) { return 0.5 * (m.sigma(j) + m.sigma(j + 1)); },
      [&](int i) { return -(m.sigma(i + 1) - m.sigma(i)); });
}

Vector dl_rhs(const Discretization& disc, const Dipole& dipole) {
  const auto obs = disc.anchor_observations(disc.all_dofs());
  Vector b(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) b[k] = v_inc(dipole, obs[k].point);
  return b;
}

DenseMatrix adl_matrix(const Discretization& disc) {
  const HeadModel& m = disc.model();
  for (int j = 1; j <= m.layers(); ++j) {
    if (m.sigma(j + 1) == m.sigma(j)) throw ConductivityJumpZero(j);
  }
  const DofMap dofs = disc.all_dofs();
  return assemble_operator(
      disc, KernelKind::AdjointObservation, dofs, dofs,
      [&](int j) { return (m.sigma(j) + m.sigma(j + 1)) / (2.0 * (m.sigma(j + 1) - m.sigma(j))); },
      [](int) { return -1.0; });
}

Vector adl_rhs(const Discretization& disc, const Dipole& dipole) {
  const auto obs = disc.anchor_observations(disc.all_dofs());
  const double s1 = disc.model().sigma(1);
  Vector b(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    b[k] = v_inc_normal_derivative(dipole, obs[k].point, obs[k].normal, s1);
  }
  return b;
}

DenseMatrix isadl_isolated_matrix(const Discretization& disc) {
  const HeadModel& m = disc.model();
  const int k = require_skull(m);
  const DofMap dofs = disc.dofs(interface_range(1, k - 1));
  return assemble_operator(
      disc, KernelKind::DoubleLayerSource, dofs, dofs,
      [&](int j) { return 0.5 * (m.sigma(j) + sigma_tilde(m, j + 1)); },
      [&](int i) { return -(sigma_tilde(m, i + 1) - m.sigma(i)); });
}

Vector isadl_isolated_rhs(const Discretization& disc, const Dipole& dipole) {
  const int k = require_skull(disc.model());
  const auto obs = disc.anchor_observations(disc.dofs(interface_range(1, k - 1)));
  Vector b(obs.size());
  for (std::size_t n = 0; n < obs.size(); ++n) b[n] = v_inc(dipole, obs[n].point);
  return b;
}

Vector isadl_correction_rhs(const Discretization& disc, const Dipole& dipole,
                            const SurfaceDensity& v_isa) {
  const HeadModel& m = disc.model();
  const int k = require_skull(m);
  const double sk = m.sigma(k);
  const double sk1 = m.sigma(k - 1);
  const DofMap dofs = disc.all_dofs();
  const auto obs = disc.anchor_observations(dofs);
  const int na = disc.rule().size();

  // sum_{i <= K-2} sigma_K (sigma_{i+1} - sigma_i) / sigma_{K-1} D_i V_ISA; the
  // self patch gives the principal value where the observation lies on S_i.
  const Vector coupled = apply_operator(disc, KernelKind::DoubleLayerSource, obs, v_isa, [&](int i) {
    return i <= k - 2 ? sk * (m.sigma(i + 1) - m.sigma(i)) / sk1 : 0.0;
  });

  Vector b(obs.size());
  for (int r = 0; r < dofs.size(); ++r) {
    const DofMap::Dof d = dofs.dof(r);
    double value = sk / sk1 * v_inc(dipole, obs[r].point) + coupled[r];
    if (d.interface <= k - 1) {
      const double jac = disc.surface(d.interface).anchor_jacobians()[d.patch * na + d.anchor];
      const double v_at = v_isa.coefficients[v_isa.dofs.index(d.interface, d.patch, d.anchor)] / jac;
      const double factor = d.interface == k - 1
                                ? sk
                                : sk * (m.sigma(d.interface) + m.sigma(d.interface + 1)) /
                                      (2.0 * sk1);
      value -= factor * v_at;
    }
    b[r] = value;
  }
  return b;
}

DenseMatrix iadl_matrix(const Discretization& disc) {
  const HeadModel& m = disc.model();
  const int n = m.layers();
  if (n < 2) throw ValidationError("IADL needs at least two interfaces");
  if (m.sigma(n) == m.sigma(n - 1)) throw ConductivityJumpZero(n - 1);
  const DofMap dofs = disc.dofs({n - 1, n});
  return assemble_operator(
      disc, KernelKind::AdjointObservation, dofs, dofs,
      [&](int j) { return j == n ? 0.5 : -0.5; }, [](int) { return 1.0; });
}

Vector iadl_rhs(const Discretization& disc, const SurfaceDensity& xi) {
  const HeadModel& m = disc.model();
  const int n = m.layers();
  if (n < 2) throw ValidationError("IADL needs at least two interfaces");
  if (m.sigma(n) == m.sigma(n - 1)) throw ConductivityJumpZero(n - 1);
  const DofMap dofs = disc.dofs({n - 1, n});
  const double factor = m.sigma(n - 1) / (m.sigma(n) - m.sigma(n - 1));
  Vector b = Vector::Zero(dofs.size());
  const SourceSurface& src = disc.surface(n - 1);
  for (int r = 0; r < dofs.block_size(n - 1); ++r) {
    const double jac = src.anchor_jacobians()[r];
    b[r] = factor * xi.coefficients[xi.dofs.offset(n - 1) + r] / jac;
  }
  return b;
}

namespace {

AssembledSystem make_system(Formulation f, std::string stage, DenseMatrix z, Vector b,
                            DofMap dofs) {
  AssembledSystem s;
  s.formulation = f;
  s.stage = std::move(stage);
  s.matrix = std::move(z);
  s.rhs = std::move(b);
  s.dofs = std::move(dofs);
  return s;
}

DensityKind solved_kind(const AssembledSystem& s) {
  switch (s.formulation) {
    case Formulation::DL:
      return DensityKind::V;
    case Formulation::ADL:
      return DensityKind::Xi;
    case Formulation::ISADL:
      return s.stage == "isolated" ? DensityKind::VIsa : DensityKind::VCorr;
    case Formulation::IADL:
    default:
      return DensityKind::JInner;
  }
}

}  // namespace

AssembledSystem assemble_dl(const Discretization& disc, const Dipole& dipole) {
  return make_system(Formulation::DL, "", dl_matrix(disc), dl_rhs(disc, dipole), disc.all_dofs());
}

AssembledSystem assemble_adl(const Discretization& disc, const Dipole& dipole) {
  return make_system(Formulation::ADL, "", adl_matrix(disc), adl_rhs(disc, dipole),
                     disc.all_dofs());
}

AssembledSystem assemble_isadl_isolated(const Discretization& disc, const Dipole& dipole) {
  const int k = require_skull(disc.model());
  return make_system(Formulation::ISADL, "isolated", isadl_isolated_matrix(disc),
                     isadl_isolated_rhs(disc, dipole), disc.dofs(interface_range(1, k - 1)));
}

AssembledSystem assemble_isadl_correction(const Discretization& disc, const Dipole& dipole,
                                          const SurfaceDensity& v_isa) {
  return make_system(Formulation::ISADL, "correction", dl_matrix(disc),
                     isadl_correction_rhs(disc, dipole, v_isa), disc.all_dofs());
}

AssembledSystem assemble_iadl(const Discretization& disc, const SurfaceDensity& xi) {
  const int n = disc.model().layers();
  return make_system(Formulation::IADL, "", iadl_matrix(disc), iadl_rhs(disc, xi),
                     disc.dofs({n - 1, n}));
}

SurfaceDensity solve(const AssembledSystem& system, SolveReport* report) {
  const LuFactorization lu(system.matrix);
  SurfaceDensity d;
  d.kind = solved_kind(system);
  d.dofs = system.dofs;
  d.coefficients = lu.solve(system.rhs);
  if (report) report->residual = relative_residual(system.matrix, d.coefficients, system.rhs);
  return d;
}

const SurfaceDensity& Solution::density(DensityKind kind) const {
  for (const auto& d : densities) {
    if (d.kind == kind) return d;
  }
  throw ValidationError("solution has no " + to_string(kind) + " density");
}

namespace {

// J_inner and J_outer as one density over S_{N-1} and S_N.
SurfaceDensity split_density(const SurfaceDensity& joint, DensityKind kind, const DofMap& map) {
  SurfaceDensity d;
  d.kind = kind;
  d.dofs = map;
  d.coefficients = Vector::Zero(map.size());
  const int iface = map.interfaces().front();
  d.coefficients = joint.coefficients.segment(joint.dofs.offset(iface), map.size());
  return d;
}

Vector on_patch_values(const Discretization& disc, const SurfaceDensity& density,
                       const std::vector<Observation>& eval, bool skip_missing) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(eval.size()));
  for (std::size_t k = 0; k < eval.size(); ++k) {
    const Observation& o = eval[k];
    if (!o.location || o.interface < 1) {
      throw ValidationError("on-surface recovery needs observations located on a patch");
    }
    if (!density.dofs.contains(o.interface)) {
      if (skip_missing) continue;
      throw ValidationError("density not defined on the observation interface");
    }
    out[k] = density.value_at(disc.model().interface(o.interface), disc.rule(),
                              o.location->patch, o.location->alpha, o.location->beta);
  }
  return out;
}

}  // namespace

Vector recover_potential(const Discretization& disc, const Solution& solution,
                         const std::vector<Observation>& eval) {
  const HeadModel& m = disc.model();
  switch (solution.formulation) {
    case Formulation::DL:
      return on_patch_values(disc, solution.density(DensityKind::V), eval, false);
    case Formulation::ISADL: {
      Vector v = on_patch_values(disc, solution.density(DensityKind::VCorr), eval, false);
      v += on_patch_values(disc, solution.density(DensityKind::VIsa), eval, true);
      return v;
    }
    case Formulation::ADL: {
      Vector v = apply_operator(disc, KernelKind::Single, eval, solution.density(DensityKind::Xi),
                                [](int) { return 1.0; });
      for (std::size_t k = 0; k < eval.size(); ++k) {
        v[k] += v_inc(solution.dipole, eval[k].point) / m.sigma(1);
      }
      return v;
    }
    case Formulation::IADL:
    default: {
      auto one = [](int) { return 1.0; };
      return apply_operator(disc, KernelKind::Single, eval,
                            solution.density(DensityKind::JInner), one) +
             apply_operator(disc, KernelKind::Single, eval,
                            solution.density(DensityKind::JOuter), one);
    }
  }
}

std::vector<FormulationRun> run_formulations(const Discretization& disc,
                                             const std::vector<Formulation>& formulations,
                                             const std::vector<Dipole>& dipoles) {
  auto wants = [&](Formulation f) {
    return std::find(formulations.begin(), formulations.end(), f) != formulations.end();
  };
  const HeadModel& m = disc.model();
  const int n = m.layers();
  const DofMap all = disc.all_dofs();
  std::vector<std::pair<Formulation, FormulationRun>> done;

  auto density_of = [](DensityKind kind, const DofMap& map, Vector x) {
    SurfaceDensity d;
    d.kind = kind;
    d.dofs = map;
    d.coefficients = std::move(x);
    return d;
  };

  if (wants(Formulation::DL) || wants(Formulation::ISADL)) {
    auto t0 = Clock::now();
    const DenseMatrix z = dl_matrix(disc);
    const double t_matrix = seconds_since(t0);
    t0 = Clock::now();
    const LuFactorization lu(z);
    const double t_factor = seconds_since(t0);

    if (wants(Formulation::DL)) {
      FormulationRun run;
      run.unknowns = all.size();
      run.assemble_seconds = t_matrix;
      run.solve_seconds = t_factor;
      for (const auto& dp : dipoles) {
        auto t1 = Clock::now();
        const Vector b = dl_rhs(disc, dp);
        run.assemble_seconds += seconds_since(t1);
        t1 = Clock::now();
        Vector x = lu.solve(b);
        run.solve_seconds += seconds_since(t1);
        run.residual = std::max(run.residual, relative_residual(z, x, b));
        run.solutions.push_back({Formulation::DL, dp, {density_of(DensityKind::V, all, x)}});
      }
      done.emplace_back(Formulation::DL, std::move(run));
    }

    if (wants(Formulation::ISADL)) {
      FormulationRun run;
      run.unknowns = all.size();
      auto t1 = Clock::now();
      const DenseMatrix zi = isadl_isolated_matrix(disc);
      run.assemble_seconds = t_matrix + seconds_since(t1);
      t1 = Clock::now();
      const LuFactorization lui(zi);
      run.solve_seconds = t_factor + seconds_since(t1);
      const DofMap inner = disc.dofs(interface_range(1, m.skull_index() - 1));
      for (const auto& dp : dipoles) {
        t1 = Clock::now();
        const Vector bi = isadl_isolated_rhs(disc, dp);
        run.assemble_seconds += seconds_since(t1);
        t1 = Clock::now();
        SurfaceDensity v_isa = density_of(DensityKind::VIsa, inner, lui.solve(bi));
        run.solve_seconds += seconds_since(t1);
        run.residual = std::max(run.residual, relative_residual(zi, v_isa.coefficients, bi));
        t1 = Clock::now();
        const Vector bc = isadl_correction_rhs(disc, dp, v_isa);
        run.assemble_seconds += seconds_since(t1);
        t1 = Clock::now();
        Vector xc = lu.solve(bc);
        run.solve_seconds += seconds_since(t1);
        run.residual = std::max(run.residual, relative_residual(z, xc, bc));
        run.solutions.push_back(
            {Formulation::ISADL, dp,
             {std::move(v_isa), density_of(DensityKind::VCorr, all, std::move(xc))}});
      }
      done.emplace_back(Formulation::ISADL, std::move(run));
    }
  }

  if (wants(Formulation::ADL) || wants(Formulation::IADL)) {
    auto t0 = Clock::now();
    FormulationRun adl;
    adl.unknowns = all.size();
    {
      const DenseMatrix z = adl_matrix(disc);
      adl.assemble_seconds = seconds_since(t0);
      t0 = Clock::now();
      const LuFactorization lu(z);
      adl.solve_seconds = seconds_since(t0);
      for (const auto& dp : dipoles) {
        auto t1 = Clock::now();
        const Vector b = adl_rhs(disc, dp);
        adl.assemble_seconds += seconds_since(t1);
        t1 = Clock::now();
        Vector x = lu.solve(b);
        adl.solve_seconds += seconds_since(t1);
        adl.residual = std::max(adl.residual, relative_residual(z, x, b));
        adl.solutions.push_back({Formulation::ADL, dp, {density_of(DensityKind::Xi, all, x)}});
      }
    }

    if (wants(Formulation::IADL)) {
      FormulationRun run;
      const DofMap outer = disc.dofs({n - 1, n});
      const DofMap inner_map = disc.dofs({n - 1});
      const DofMap outer_map = disc.dofs({n});
      run.unknowns = outer.size();
      auto t1 = Clock::now();
      const DenseMatrix z = iadl_matrix(disc);
      run.assemble_seconds = adl.assemble_seconds + seconds_since(t1);
      t1 = Clock::now();
      const LuFactorization lu(z);
      run.solve_seconds = adl.solve_seconds + seconds_since(t1);
      run.residual = adl.residual;
      for (const auto& s : adl.solutions) {
        const SurfaceDensity& xi = s.densities.front();
        t1 = Clock::now();
        const Vector b = iadl_rhs(disc, xi);
        run.assemble_seconds += seconds_since(t1);
        t1 = Clock::now();
        SurfaceDensity joint = density_of(DensityKind::JInner, outer, lu.solve(b));
        run.solve_seconds += seconds_since(t1);
        run.residual = std::max(run.residual, relative_residual(z, joint.coefficients, b));
        run.solutions.push_back({Formulation::IADL,
                                 s.dipole,
                                 {xi, split_density(joint, DensityKind::JInner, inner_map),
                                  split_density(joint, DensityKind::JOuter, outer_map)}});
      }
      done.emplace_back(Formulation::IADL, std::move(run));
    }
    if (wants(Formulation::ADL)) done.emplace_back(Formulation::ADL, std::move(adl));
  }

  std::vector<FormulationRun> out;
  for (Formulation f : formulations) {
    const auto it = std::find_if(done.begin(), done.end(),
                                 [&](const auto& entry) { return entry.first == f; });
    out.push_back(it->second);
  }
  return out;
}

FormulationRun run_formulation(const Discretization& disc, Formulation f,
                               const std::vector<Dipole>& dipoles) {
  return run_formulations(disc, {f}, dipoles).front();
}

}  // namespace nystrom
