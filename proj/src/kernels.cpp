#include "nystrom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nystrom/errors.hpp"
#include "nystrom/quadrature.hpp"

namespace nystrom {
namespace {

constexpr double kInv4Pi = 0.25 * std::numbers::inv_pi;

bool is_weak(KernelKind kind) { return kind != KernelKind::DoubleLayerSource; }

// Sum over the nodes of a singular rule about `frame_p`. `weights(j, frame)` gives
// the density vector at node j, `origin` the same at the singular point; the
// strongly singular kind subtracts the 1/rho term and adds it back analytically.
template <typename Weights>
void singular_sum(KernelKind kind, const PatchNodes& nodes, const SurfaceFrame& frame_p,
                  const Eigen::Vector3d& n_obs, const SingularRule& rule, const BasisValues& origin,
                  Weights&& weights, BasisValues& out) {
  out.setZero(origin.size());
  // The map is quadratic, so r' - r is its exact Taylor expansion about the
  // singular point; this avoids cancelling absolute coordinates as R -> 0.
  using Shape = Eigen::Matrix<double, 6, 1>;
  const Eigen::Vector3d x_aa = nodes * (Shape() << 4, 4, 0, -8, 0, 0).finished();
  const Eigen::Vector3d x_bb = nodes * (Shape() << 4, 0, 4, 0, 0, -8).finished();
  const Eigen::Vector3d x_ab = nodes * (Shape() << 4, 0, 0, -4, 4, -4).finished();
  const int nr = rule.radial_points;
  BasisValues ray_sum(origin.size());
  for (const auto& ray : rule.rays) {
    ray_sum.setZero();
    BasisValues f1;
    double log_term = 0.0;
    if (kind == KernelKind::DoubleLayerSource) {
      const Eigen::Vector3d a =
          frame_p.d_alpha * ray.direction.x() + frame_p.d_beta * ray.direction.y();
      const double an = a.norm();
      f1 = -origin * (kInv4Pi * frame_p.normal.dot(a) / (an * an * an));
      log_term = std::log(ray.rho_max * an);
    }
    for (int j = ray.first; j < ray.first + nr; ++j) {
      const SurfaceFrame f = surface_frame(nodes, rule.nodes[j].x(), rule.nodes[j].y());
      const double rho = rule.rho[j];
      const double da = rho * ray.direction.x(), db = rho * ray.direction.y();
      const Eigen::Vector3d offset = frame_p.d_alpha * da + frame_p.d_beta * db +
                                     0.5 * (x_aa * (da * da) + x_bb * (db * db)) +
                                     x_ab * (da * db);
      const double k = kernel_from_offset(kind, -offset, n_obs, f.normal);
      const double w = rule.radial_weight[j];
      if (kind == KernelKind::DoubleLayerSource) {
        ray_sum += w * (rho * k * weights(j, f) - f1 / rho);
      } else {
        ray_sum += (w * rho * k) * weights(j, f);
      }
    }
    if (kind == KernelKind::DoubleLayerSource) ray_sum += f1 * log_term;
    out += ray.weight * ray_sum;
  }
}

double min_distance(const Eigen::Matrix3Xd& points, int first, int count, const Point3& x) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = first; k < first + count; ++k) {
    best = std::min(best, (points.col(k) - x).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

void SolverConfig::validate(int anchors_per_patch) const {
  if (!(chi > 0.0)) throw ValidationError("solver.chi must be positive");
  if (near_points != 1 && near_points != 3 && near_points != 6 && near_points != 16) {
    throw ValidationError("solver.near_points must be one of 1, 3, 6, 16");
  }
  if (near_points <= anchors_per_patch) {
    throw ValidationError("solver.near_points must exceed the anchors per patch");
  }
  if (line_points < 1 || line_points > 64) {
    throw ValidationError("solver.line_points must be in [1, 64]");
  }
  if (polar_sectors < 3 || polar_sectors % 3 != 0) {
    throw ValidationError("solver.polar_sectors must be a positive multiple of 3");
  }
  if (near_subdivisions < 0 || near_subdivisions > 3) {
    throw ValidationError("solver.near_subdivisions must be in [0, 3]");
  }
  if (duffy_subdivisions < 1) throw ValidationError("solver.duffy_subdivisions must be >= 1");
  if (!(jacobian_eps >= 0.0)) throw ValidationError("solver.jacobian_eps must be >= 0");
}

Observation observation_on(const SurfaceMesh& mesh, int patch, double alpha, double beta) {
  const SurfaceFrame f = mesh.frame(patch, alpha, beta);
  Observation obs;
  obs.point = f.position;
  obs.normal = f.normal;
  obs.interface = mesh.interface_index();
  obs.location = SurfaceLocation{patch, alpha, beta};
  return obs;
}

Observation observation_at(const Point3& point, const Eigen::Vector3d& normal) {
  Observation obs;
  obs.point = point;
  obs.normal = normal;
  return obs;
}

SourceSurface::SourceSurface(const SurfaceMesh& mesh, const InterpolationRule& rule,
                             const TriangleRule& near, double jacobian_eps)
    : mesh_(&mesh), na_(rule.size()), nk_(near.size()) {
  const int np = mesh.num_patches();
  anchor_pos_.resize(3, np * na_);
  anchor_nrm_.resize(3, np * na_);
  anchor_jac_.resize(np * na_);
  near_pos_.resize(3, np * nk_);
  near_nrm_.resize(3, np * nk_);
  bound_center_.resize(np);
  bound_radius_.resize(np);
  for (int p = 0; p < np; ++p) {
    for (int a = 0; a < na_; ++a) {
      const SurfaceFrame f = mesh.frame(p, rule.anchor(a).x(), rule.anchor(a).y());
      if (!(f.jacobian > jacobian_eps)) throw DegeneratePatch(p, f.jacobian);
      anchor_pos_.col(p * na_ + a) = f.position;
      anchor_nrm_.col(p * na_ + a) = f.normal;
      anchor_jac_[p * na_ + a] = f.jacobian;
    }
    const Point3 c = mesh.center(p);
    double radius = 0.0;
    for (int k = 0; k < nk_; ++k) {
      const SurfaceFrame f = mesh.frame(p, near.points[k].x(), near.points[k].y());
      if (!(f.jacobian > jacobian_eps)) throw DegeneratePatch(p, f.jacobian);
      near_pos_.col(p * nk_ + k) = f.position;
      near_nrm_.col(p * nk_ + k) = f.normal;
      radius = std::max(radius, (f.position - c).norm());
    }
    bound_center_[p] = c;
    bound_radius_[p] = radius;
  }
  near_wl_.resize(nk_, na_);
  for (int k = 0; k < nk_; ++k) {
    near_wl_.row(k) =
        near.weights[k] * rule.evaluate(near.points[k].x(), near.points[k].y()).transpose();
  }
}

double SingularRule::area() const {
  double sum = 0.0;
  for (const auto& ray : rays) {
    for (int j = ray.first; j < ray.first + radial_points; ++j) {
      sum += ray.weight * radial_weight[j] * rho[j];
    }
  }
  return sum;
}

SingularRule build_singular_rule(double alpha, double beta, int line_points, int angular_splits,
                                 bool sinh_grading) {
  const Eigen::Vector2d p(alpha, beta);
  const Eigen::Vector2d corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const LineRule radial = gauss_legendre(line_points, 0.0, 1.0);
  const LineRule unit = gauss_legendre(line_points);

  SingularRule rule;
  rule.origin = p;
  rule.radial_points = line_points;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d ea = corners[e];
    const Eigen::Vector2d eb = corners[(e + 1) % 3];
    const double len = (eb - ea).norm();
    const Eigen::Vector2d dir = (eb - ea) / len;
    const double s0 = (p - ea).dot(dir);
    const Eigen::Vector2d foot = ea + s0 * dir;
    const double d = (p - foot).norm();
    if (d < 1e-14) continue;
    // Edge points are foot + s * dir with s in [lo, hi], split at the foot.
    const double lo = -s0;
    const double hi = len - s0;
    std::vector<std::pair<double, double>> pieces;
    if (lo < 0.0 && hi > 0.0) {
      pieces = {{lo, 0.0}, {0.0, hi}};
    } else {
      pieces = {{lo, hi}};
    }
    for (const auto& [a, b] : pieces) {
      const double ta = sinh_grading ? std::asinh(a / d) : a;
      const double tb = sinh_grading ? std::asinh(b / d) : b;
      for (int m = 0; m < angular_splits; ++m) {
        const double t0 = ta + (tb - ta) * m / angular_splits;
        const double t1 = ta + (tb - ta) * (m + 1) / angular_splits;
        const double half = 0.5 * (t1 - t0);
        const double mid = 0.5 * (t1 + t0);
        for (int i = 0; i < unit.size(); ++i) {
          const double t = mid + half * unit.points[i];
          double s = t;
          double ws = half * unit.weights[i];
          if (sinh_grading) {
            s = d * std::sinh(t);
            ws *= d * std::cosh(t);
          }
          const Eigen::Vector2d v = foot + s * dir - p;
          const double rho_max = v.norm();
          SingularRule::Ray ray;
          ray.direction = v / rho_max;
          ray.rho_max = rho_max;
          ray.weight = ws * d / (rho_max * rho_max);
          ray.first = static_cast<int>(rule.nodes.size());
          rule.rays.push_back(ray);
          for (int j = 0; j < radial.size(); ++j) {
            const double rho = radial.points[j] * rho_max;
            rule.nodes.push_back(p + rho * ray.direction);
            rule.rho.push_back(rho);
            rule.radial_weight.push_back(radial.weights[j] * rho_max);
          }
        }
      }
    }
  }
  return rule;
}

PatchIntegrator::PatchIntegrator(const InterpolationRule& rule, const SolverConfig& cfg)
    : rule_(&rule), cfg_(cfg) {
  cfg_.validate(rule.size());
  near_ = subdivide(triangle_rule(cfg_.near_points), cfg_.near_subdivisions);
  std::vector<Eigen::Vector2d> origins;
  for (int a = 0; a < rule.size(); ++a) origins.push_back(rule.anchor(a));
  origins.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  for (const auto& o : origins) {
    SingularRule scratch;
    singular_rule(KernelKind::Single, o.x(), o.y(), scratch);
    weak_cache_.emplace(std::make_pair(o.x(), o.y()), std::move(scratch));
    SingularRule strong;
    singular_rule(KernelKind::DoubleLayerSource, o.x(), o.y(), strong);
    strong_cache_.emplace(std::make_pair(o.x(), o.y()), std::move(strong));
  }
}

const SingularRule& PatchIntegrator::singular_rule(KernelKind kind, double alpha, double beta,
                                                   SingularRule& scratch) const {
  const auto& cache = is_weak(kind) ? weak_cache_ : strong_cache_;
  if (auto it = cache.find({alpha, beta}); it != cache.end()) return it->second;
  const int splits = is_weak(kind) ? cfg_.duffy_subdivisions : cfg_.polar_sectors / 3;
  scratch = build_singular_rule(alpha, beta, cfg_.line_points, splits, cfg_.sinh_grading);
  scratch.basis.resize(static_cast<Eigen::Index>(scratch.nodes.size()), rule_->size());
  for (std::size_t j = 0; j < scratch.nodes.size(); ++j) {
    scratch.basis.row(static_cast<Eigen::Index>(j)) =
        rule_->evaluate(scratch.nodes[j].x(), scratch.nodes[j].y()).transpose();
  }
  scratch.origin_basis = rule_->evaluate(alpha, beta);
  return scratch;
}

void PatchIntegrator::check_enabled(KernelKind kind) const {
  if (is_weak(kind) ? !cfg_.weak_singular : !cfg_.strong_singular) {
    throw NotImplementedSingularity(is_weak(kind) ? "weakly singular self term disabled"
                                                  : "strongly singular self term disabled");
  }
}

Regime PatchIntegrator::regime(const SourceSurface& src, const Observation& obs,
                               int patch) const {
  if (obs.location && obs.interface == src.interface_index() && obs.location->patch == patch) {
    return Regime::Self;
  }
  const double reach = (obs.point - src.bound_center(patch)).norm() - src.bound_radius(patch);
  if (reach > cfg_.chi) return Regime::Far;
  const double d = min_distance(src.near_points(), patch * src.near_count(), src.near_count(),
                                obs.point);
  return d > cfg_.chi ? Regime::Far : Regime::Near;
}

void PatchIntegrator::integrate(KernelKind kind, const SourceSurface& src,
                                const Observation& obs, int patch, BasisValues& out) const {
  const int na = src.anchors();
  switch (regime(src, obs, patch)) {
    case Regime::Far: {
      out.resize(na);
      const int base = patch * na;
      for (int a = 0; a < na; ++a) {
        out[a] = rule_->weight(a) * kernel_value(kind, obs.point, obs.normal,
                                                 src.anchor_points().col(base + a),
                                                 src.anchor_normals().col(base + a));
      }
      return;
    }
    case Regime::Near: {
      const int nk = src.near_count();
      const int base = patch * nk;
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 1024, 1> k(nk);
      for (int j = 0; j < nk; ++j) {
        k[j] = kernel_value(kind, obs.point, obs.normal, src.near_points().col(base + j),
                            src.near_normals().col(base + j));
      }
      out.noalias() = src.near_weighted_basis().transpose() * k;
      return;
    }
    case Regime::Self:
      integrate_self(kind, src.mesh(), obs, patch, out);
      return;
  }
}

void PatchIntegrator::integrate_self(KernelKind kind, const SurfaceMesh& mesh,
                                     const Observation& obs, int patch, BasisValues& out) const {
  check_enabled(kind);
  const SurfaceLocation loc = obs.location.value_or(SurfaceLocation{patch, 1.0 / 3.0, 1.0 / 3.0});
  SingularRule scratch;
  const SingularRule& rule = singular_rule(kind, loc.alpha, loc.beta, scratch);
  const SurfaceFrame fp = mesh.frame(patch, loc.alpha, loc.beta);
  singular_sum(kind, mesh.patch_nodes(patch), fp, obs.normal, rule, rule.origin_basis,
               [&](int j, const SurfaceFrame&) -> BasisValues { return rule.basis.row(j); },
               out);
}

double PatchIntegrator::integrate_density(
    KernelKind kind, const SurfaceMesh& mesh, const Observation& obs, int patch,
    const std::function<double(double, double)>& density) const {
  auto weighted = [&](const TriangleRule& rule) {
    double sum = 0.0;
    for (int k = 0; k < rule.size(); ++k) {
      const auto& pt = rule.points[k];
      const SurfaceFrame f = mesh.frame(patch, pt.x(), pt.y());
      sum += rule.weights[k] * f.jacobian * density(pt.x(), pt.y()) *
             kernel_value(kind, obs.point, obs.normal, f.position, f.normal);
    }
    return sum;
  };

  if (obs.location && obs.interface == mesh.interface_index() && obs.location->patch == patch) {
    check_enabled(kind);
    const SurfaceLocation& loc = *obs.location;
    SingularRule scratch;
    const SingularRule& rule = singular_rule(kind, loc.alpha, loc.beta, scratch);
    const SurfaceFrame fp = mesh.frame(patch, loc.alpha, loc.beta);
    BasisValues origin(1);
    origin[0] = density(loc.alpha, loc.beta) * fp.jacobian;
    BasisValues out;
    singular_sum(kind, mesh.patch_nodes(patch), fp, obs.normal, rule, origin,
                 [&](int j, const SurfaceFrame& f) -> BasisValues {
                   BasisValues v(1);
                   v[0] = density(rule.nodes[j].x(), rule.nodes[j].y()) * f.jacobian;
                   return v;
                 },
                 out);
    return out[0];
  }

  double d = std::numeric_limits<double>::infinity();
  for (const auto& pt : near_.points) {
    d = std::min(d, (mesh.map(patch, pt.x(), pt.y()) - obs.point).norm());
  }
  return weighted(d > cfg_.chi ? rule_->anchors() : near_);
}

double integral(KernelKind kind, const SourceSurface& src, const Observation& obs, int patch,
                int basis, const PatchIntegrator& integrator) {
  if (basis < 0 || basis >= src.anchors()) {
    throw ValidationError("basis index " + std::to_string(basis) + " out of range");
  }
  return integrator.integrate(kind, src, obs, patch)[basis];
}

double solid_angle_fraction(const SurfaceMesh& mesh, const Observation& obs,
                            const PatchIntegrator& integrator) {
  double sum = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    sum += integrator.integrate_density(KernelKind::DoubleLayerSource, mesh, obs, p,
                                        [](double, double) { return 1.0; });
  }
  return -sum;
}

double single_layer_total(const SurfaceMesh& mesh, const Observation& obs,
                          const PatchIntegrator& integrator) {
  double sum = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    sum += integrator.integrate_density(KernelKind::Single, mesh, obs, p,
                                        [](double, double) { return 1.0; });
  }
  return sum;
}

}  // namespace nystrom
