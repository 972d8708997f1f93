#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nystrom/interpolation.hpp"
#include "nystrom/mesh.hpp"

namespace nystrom {

struct SolverConfig {
  double chi = 0.04;          // far/near distance threshold, m
  int near_points = 16;       // triangle rule for the near regime
  int near_subdivisions = 0;  // near rule repeated on 4^n subtriangles
  int line_points = 15;       // Gauss-Legendre points per ray and per angular sector
  int polar_sectors = 3;      // angular sectors of the strongly singular rule, a multiple of 3
  int duffy_subdivisions = 1; // angular splits per edge sector of the weakly singular rule
  bool sinh_grading = true;   // grade angular nodes towards the foot of each edge
  bool weak_singular = true;
  bool strong_singular = true;
  double jacobian_eps = 1e-14;

  /// Throws ValidationError naming the offending field.
  void validate(int anchors_per_patch) const;
};

enum class KernelKind {
  DoubleLayerSource,   // d/dn' G = n'.(r - r') / (4 pi R^3)
  AdjointObservation,  // d/dn G  = n.(r' - r) / (4 pi R^3)
  Single,              // G = 1 / (4 pi R)
};

enum class Regime { Far, Near, Self };

inline double green(const Point3& r, const Point3& rp) {
  return 1.0 / (4.0 * std::numbers::pi * (r - rp).norm());
}

/// Kernel from the offset d = r - r'.
inline double kernel_from_offset(KernelKind kind, const Eigen::Vector3d& d,
                                 const Eigen::Vector3d& n_obs, const Eigen::Vector3d& n_src) {
  const double r2 = d.squaredNorm();
  const double inv = 1.0 / std::sqrt(r2);
  constexpr double c = 0.25 * std::numbers::inv_pi;
  switch (kind) {
    case KernelKind::DoubleLayerSource:
      return c * n_src.dot(d) * inv * inv * inv;
    case KernelKind::AdjointObservation:
      return -c * n_obs.dot(d) * inv * inv * inv;
    case KernelKind::Single:
    default:
      return c * inv;
  }
}

inline double kernel_value(KernelKind kind, const Point3& r, const Eigen::Vector3d& n_obs,
                           const Point3& rp, const Eigen::Vector3d& n_src) {
  return kernel_from_offset(kind, r - rp, n_obs, n_src);
}

/// A point on a patch in parametric coordinates.
struct SurfaceLocation {
  int patch = -1;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Observation point. `interface` is the 1-based interface carrying the
/// point, 0 for volume points; `location` is set for on-surface points.
struct Observation {
  Point3 point = Point3::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  int interface = 0;
  std::optional<SurfaceLocation> location;
};

Observation observation_on(const SurfaceMesh& mesh, int patch, double alpha, double beta);
Observation observation_at(const Point3& point,
                           const Eigen::Vector3d& normal = Eigen::Vector3d::Zero());

/// Per-patch anchor and near-rule samples of one interface.
class SourceSurface {
 public:
  SourceSurface(const SurfaceMesh& mesh, const InterpolationRule& rule, const TriangleRule& near,
                double jacobian_eps);

  const SurfaceMesh& mesh() const { return *mesh_; }
  int interface_index() const { return mesh_->interface_index(); }
  int num_patches() const { return mesh_->num_patches(); }
  int anchors() const { return na_; }
  int near_count() const { return nk_; }

  /// Column p * anchors() + a.
  const Eigen::Matrix3Xd& anchor_points() const { return anchor_pos_; }
  const Eigen::Matrix3Xd& anchor_normals() const { return anchor_nrm_; }
  const Eigen::VectorXd& anchor_jacobians() const { return anchor_jac_; }
  /// Column p * near_count() + k.
  const Eigen::Matrix3Xd& near_points() const { return near_pos_; }
  const Eigen::Matrix3Xd& near_normals() const { return near_nrm_; }
  /// Row k: w_k L_a(x_k).
  const Eigen::MatrixXd& near_weighted_basis() const { return near_wl_; }
  const Point3& bound_center(int p) const { return bound_center_[p]; }
  double bound_radius(int p) const { return bound_radius_[p]; }

 private:
  const SurfaceMesh* mesh_;
  int na_;
  int nk_;
  Eigen::Matrix3Xd anchor_pos_, anchor_nrm_, near_pos_, near_nrm_;
  Eigen::VectorXd anchor_jac_;
  Eigen::MatrixXd near_wl_;
  std::vector<Point3> bound_center_;
  std::vector<double> bound_radius_;
};

using BasisValues = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

/// Parameter-space rule around a singular point: rays from the point to the
/// three edges, each sampled radially.
struct SingularRule {
  Eigen::Vector2d origin;
  struct Ray {
    Eigen::Vector2d direction;
    double rho_max;
    double weight;  // angular weight
    int first;      // index of its first radial node
  };
  std::vector<Ray> rays;
  std::vector<Eigen::Vector2d> nodes;  // parametric points
  std::vector<double> rho;             // distance from origin
  std::vector<double> radial_weight;   // includes rho_max
  int radial_points = 0;
  Eigen::MatrixXd basis;      // row per node, filled for a given interpolation rule
  BasisValues origin_basis;

  /// area = sum over nodes of radial_weight * rho * ray weight.
  double area() const;
};

/// angular_splits subdivides each half edge sector.
SingularRule build_singular_rule(double alpha, double beta, int line_points, int angular_splits,
                                 bool sinh_grading);

/// Evaluates the Nystrom integrals int K(r, r') theta^-1 L_a dS' over one patch
/// for every basis index a, choosing the far, near or self treatment.
class PatchIntegrator {
 public:
  PatchIntegrator(const InterpolationRule& rule, const SolverConfig& cfg);

  const InterpolationRule& rule() const { return *rule_; }
  const SolverConfig& config() const { return cfg_; }
  const TriangleRule& near_rule() const { return near_; }

  Regime regime(const SourceSurface& src, const Observation& obs, int patch) const;

  /// out(a) for a in [0, anchors).
  void integrate(KernelKind kind, const SourceSurface& src, const Observation& obs, int patch,
                 BasisValues& out) const;

  BasisValues integrate(KernelKind kind, const SourceSurface& src, const Observation& obs,
                        int patch) const {
    BasisValues out;
    integrate(kind, src, obs, patch, out);
    return out;
  }

  /// int K(r, r') g(r') dS' with g given on the patch in parametric form. The far
  /// regime uses the anchor rule, the near regime the near rule.
  double integrate_density(KernelKind kind, const SurfaceMesh& mesh, const Observation& obs,
                           int patch,
                           const std::function<double(double, double)>& density) const;

  /// Self integrals about an arbitrary on-patch location, for every basis index.
  void integrate_self(KernelKind kind, const SurfaceMesh& mesh, const Observation& obs,
                      int patch, BasisValues& out) const;

  const SingularRule& singular_rule(KernelKind kind, double alpha, double beta,
                                    SingularRule& scratch) const;

 private:
  void check_enabled(KernelKind kind) const;

  const InterpolationRule* rule_;
  SolverConfig cfg_;
  TriangleRule near_;
  // Rules about the anchors and the patch center, per singularity class.
  std::map<std::pair<double, double>, SingularRule> weak_cache_, strong_cache_;
};

/// Scalar form of PatchIntegrator::integrate for one basis index.
double integral(KernelKind kind, const SourceSurface& src, const Observation& obs, int patch,
                int basis, const PatchIntegrator& integrator);

/// Solid angle over 4 pi subtended by a closed mesh at obs, computed as
/// -sum over patches of int d/dn' G dS': 1 inside, 0 outside, 1/2 on the surface.
double solid_angle_fraction(const SurfaceMesh& mesh, const Observation& obs,
                            const PatchIntegrator& integrator);

/// sum over patches of int G dS'.
double single_layer_total(const SurfaceMesh& mesh, const Observation& obs,
                          const PatchIntegrator& integrator);

}  // namespace nystrom
