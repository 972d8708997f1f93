#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nystrom/dipole.hpp"
#include "nystrom/interpolation.hpp"
#include "nystrom/kernels.hpp"
#include "nystrom/linalg.hpp"
#include "nystrom/mesh.hpp"

namespace nystrom {

enum class Formulation { DL, ADL, ISADL, IADL };

std::string to_string(Formulation f);
/// Accepts dl, adl, isadl, iadl in any case; throws ValidationError otherwise.
Formulation parse_formulation(std::string_view name);

/// Flat unknown index over a subset of interfaces: contiguous per interface,
/// patch-major, anchor-minor.
class DofMap {
 public:
  struct Dof {
    int interface;
    int patch;
    int anchor;
  };

  DofMap() = default;
  DofMap(const HeadModel& model, int anchors, std::vector<int> interfaces);

  int size() const { return size_; }
  int anchors() const { return anchors_; }
  const std::vector<int>& interfaces() const { return interfaces_; }
  bool contains(int interface) const;
  /// First flat index of the interface block.
  int offset(int interface) const;
  int block_size(int interface) const;
  int index(int interface, int patch, int anchor) const {
    return offset(interface) + patch * anchors_ + anchor;
  }
  Dof dof(int k) const;

 private:
  int anchors_ = 0;
  int size_ = 0;
  std::vector<int> interfaces_;
  std::vector<int> offsets_;
  std::vector<int> patches_;
};

enum class DensityKind { V, Xi, VIsa, VCorr, JInner, JOuter };

std::string to_string(DensityKind k);

/// Expansion coefficients I of a density sum_a I_a theta^-1 L_a.
struct SurfaceDensity {
  DensityKind kind = DensityKind::V;
  DofMap dofs;
  Vector coefficients;

  /// Density value at an on-patch point of an interface in the map.
  double value_at(const SurfaceMesh& mesh, const InterpolationRule& rule, int patch,
                  double alpha, double beta) const;
};

struct AssembledSystem {
  Formulation formulation = Formulation::DL;
  std::string stage;  // "", "isolated", "correction"
  DenseMatrix matrix;
  Vector rhs;
  DofMap dofs;
};

/// Geometry, interpolation and kernel samples shared by every formulation on
/// one head model. Holds references to the model; the model must outlive it.
class Discretization {
 public:
  Discretization(const HeadModel& model, int order, const SolverConfig& cfg = {});
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const HeadModel& model() const { return *model_; }
  const InterpolationRule& rule() const { return rule_; }
  const PatchIntegrator& integrator() const { return *integrator_; }
  const SolverConfig& config() const { return cfg_; }
  const SourceSurface& surface(int interface) const { return surfaces_[interface - 1]; }
  int order() const { return rule_.order(); }

  DofMap dofs(const std::vector<int>& interfaces) const;
  DofMap all_dofs() const;

  /// Anchor observation points of every interface in the map, in dof order.
  std::vector<Observation> anchor_observations(const DofMap& dofs) const;
  /// Patch centers of the outer interface.
  std::vector<Observation> scalp_observations() const;

 private:
  const HeadModel* model_;
  SolverConfig cfg_;
  InterpolationRule rule_;
  std::unique_ptr<PatchIntegrator> integrator_;
  std::vector<SourceSurface> surfaces_;
};

/// Z = diag(c_j theta^-1) + w_i I(kind), rows over `rows`, columns over `cols`.
/// `diag(j)` is c_j for the row interface (used only where rows and columns
/// coincide); `weight(i)` is w_i for the column interface.
DenseMatrix assemble_operator(const Discretization& disc, KernelKind kind, const DofMap& rows,
                              const DofMap& cols, const std::function<double(int)>& diag,
                              const std::function<double(int)>& weight);

/// sum over interfaces i of the density of weight(i) * int K(r, r') Phi(r') dS' at each
/// observation. Interfaces with zero weight are skipped.
Vector apply_operator(const Discretization& disc, KernelKind kind,
                      const std::vector<Observation>& obs, const SurfaceDensity& density,
                      const std::function<double(int)>& weight);

// Matrices and right-hand sides of the four formulations.
DenseMatrix dl_matrix(const Discretization& disc);
Vector dl_rhs(const Discretization& disc, const Dipole& dipole);
DenseMatrix adl_matrix(const Discretization& disc);
Vector adl_rhs(const Discretization& disc, const Dipole& dipole);
DenseMatrix isadl_isolated_matrix(const Discretization& disc);
Vector isadl_isolated_rhs(const Discretization& disc, const Dipole& dipole);
/// The correction matrix equals dl_matrix.
Vector isadl_correction_rhs(const Discretization& disc, const Dipole& dipole,
                            const SurfaceDensity& v_isa);
DenseMatrix iadl_matrix(const Discretization& disc);
Vector iadl_rhs(const Discretization& disc, const SurfaceDensity& xi);

AssembledSystem assemble_dl(const Discretization& disc, const Dipole& dipole);
AssembledSystem assemble_adl(const Discretization& disc, const Dipole& dipole);
AssembledSystem assemble_isadl_isolated(const Discretization& disc, const Dipole& dipole);
AssembledSystem assemble_isadl_correction(const Discretization& disc, const Dipole& dipole,
                                          const SurfaceDensity& v_isa);
AssembledSystem assemble_iadl(const Discretization& disc, const SurfaceDensity& xi);

struct SolveReport {
  double residual = 0.0;  // ||Z x - b||_inf / ||b||_inf
};

SurfaceDensity solve(const AssembledSystem& system, SolveReport* report = nullptr);

/// Densities of one solved formulation. `densities` holds V (DL), Xi (ADL),
/// VIsa and VCorr (ISADL), or Xi, JInner and JOuter (IADL).
struct Solution {
  Formulation formulation = Formulation::DL;
  Dipole dipole;
  std::vector<SurfaceDensity> densities;

  const SurfaceDensity& density(DensityKind kind) const;
};

/// Potential at the observations. DL and ISADL evaluate the density on the patch
/// carrying each observation; ADL and IADL integrate single layers and accept
/// any point of the outer layer or its boundary.
Vector recover_potential(const Discretization& disc, const Solution& solution,
                         const std::vector<Observation>& eval);

/// Assemble, factor and solve one formulation for several dipoles sharing the
/// matrices.
struct FormulationRun {
  std::vector<Solution> solutions;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  double residual = 0.0;  // worst over dipoles and stages
  int unknowns = 0;
};

/// Runs several formulations in one pass. ISADL reuses the DL matrix and
/// factorization and IADL the ADL densities when both are requested; the
/// reused work is counted in the timings of each.
std::vector<FormulationRun> run_formulations(const Discretization& disc,
                                             const std::vector<Formulation>& formulations,
                                             const std::vector<Dipole>& dipoles);

FormulationRun run_formulation(const Discretization& disc, Formulation f,
                               const std::vector<Dipole>& dipoles);

}  // namespace nystrom
