#include "nystrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "nystrom/errors.hpp"
#include "nystrom/quadrature.hpp"

namespace nystrom {

SurfaceFrame surface_frame(const PatchNodes& nodes, double alpha, double beta) {
  SurfaceFrame f;
  f.position = nodes * shape_functions(alpha, beta);
  const Eigen::Matrix<double, 3, 2> tangents = nodes * shape_derivatives(alpha, beta);
  f.d_alpha = tangents.col(0);
  f.d_beta = tangents.col(1);
  const Eigen::Vector3d n = f.d_alpha.cross(f.d_beta);
  f.jacobian = n.norm();
  f.normal = f.jacobian > 0.0 ? Eigen::Vector3d(n / f.jacobian) : Eigen::Vector3d::Zero();
  return f;
}

JacobianNormal jacobian_and_normal(const PatchNodes& nodes, double alpha, double beta,
                                   double eps) {
  const SurfaceFrame f = surface_frame(nodes, alpha, beta);
  if (!(f.jacobian > eps)) throw DegeneratePatch(-1, f.jacobian);
  return {f.jacobian, f.normal};
}

SurfaceMesh::SurfaceMesh(std::vector<Point3> nodes, std::vector<QuadraticPatch> patches,
                         int interface_index)
    : nodes_(std::move(nodes)), patches_(std::move(patches)), interface_index_(interface_index) {
  const int n = num_nodes();
  geometry_.reserve(patches_.size());
  for (std::size_t p = 0; p < patches_.size(); ++p) {
    PatchNodes g;
    for (int m = 0; m < 6; ++m) {
      const int id = patches_[p].nodes[m];
      if (id < 0 || id >= n) {
        throw ValidationError("patch " + std::to_string(p) + " references node " +
                              std::to_string(id) + " out of range");
      }
      g.col(m) = nodes_[id];
    }
    geometry_.push_back(g);
  }

  std::set<std::pair<int, int>> edges;
  for (const auto& patch : patches_) {
    for (int e = 0; e < 3; ++e) {
      const int a = patch.nodes[e];
      const int b = patch.nodes[(e + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  double total = 0.0;
  for (const auto& [a, b] : edges) total += (nodes_[a] - nodes_[b]).norm();
  mean_edge_length_ = edges.empty() ? 0.0 : total / static_cast<double>(edges.size());
}

double surface_area(const SurfaceMesh& mesh) {
  const TriangleRule& rule = triangle_rule(16);
  double area = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for (int k = 0; k < rule.size(); ++k) {
      area += rule.weights[k] * mesh.frame(p, rule.points[k].x(), rule.points[k].y()).jacobian;
    }
  }
  return area;
}

double enclosed_volume(const SurfaceMesh& mesh) {
  const TriangleRule& rule = triangle_rule(16);
  double flux = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for (int k = 0; k < rule.size(); ++k) {
      const SurfaceFrame f = mesh.frame(p, rule.points[k].x(), rule.points[k].y());
      flux += rule.weights[k] * f.jacobian * f.position.dot(f.normal);
    }
  }
  return flux / 3.0;
}

double winding_number(const SurfaceMesh& mesh, const Point3& x) {
  const TriangleRule& rule = triangle_rule(16);
  double sum = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for (int k = 0; k < rule.size(); ++k) {
      const SurfaceFrame f = mesh.frame(p, rule.points[k].x(), rule.points[k].y());
      const Eigen::Vector3d d = f.position - x;
      const double r = d.norm();
      sum += rule.weights[k] * f.jacobian * f.normal.dot(d) / (r * r * r);
    }
  }
  return sum / (4.0 * std::numbers::pi);
}

void validate_mesh(const SurfaceMesh& mesh, double jacobian_eps) {
  if (mesh.num_patches() == 0) throw ValidationError("empty mesh");

  struct EdgeUse {
    int midpoint;
    bool forward;  // traversed from the lower to the higher vertex id
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> edges;
  for (const auto& patch : mesh.patches()) {
    for (int e = 0; e < 3; ++e) {
      const int a = patch.nodes[e];
      const int b = patch.nodes[(e + 1) % 3];
      if (a == b) throw ValidationError("collapsed edge");
      edges[{std::min(a, b), std::max(a, b)}].push_back({patch.nodes[3 + e], a < b});
    }
  }
  for (const auto& [key, uses] : edges) {
    if (uses.size() > 2) throw ValidationError("non-manifold edge");
    if (uses.size() < 2) throw ValidationError("open edge");
    if (uses[0].midpoint != uses[1].midpoint) throw ValidationError("edge midpoint mismatch");
    if (uses[0].forward == uses[1].forward) throw ValidationError("inconsistent orientation");
  }

  const int counts[] = {1, 3, 6, 16};
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for (int count : counts) {
      const TriangleRule& rule = triangle_rule(count);
      for (const auto& pt : rule.points) {
        const double jac = mesh.frame(p, pt.x(), pt.y()).jacobian;
        if (!(jac > jacobian_eps)) throw DegeneratePatch(p, jac);
      }
    }
  }

  if (!(enclosed_volume(mesh) > 0.0)) throw ValidationError("inward normal");
}

HeadModel::HeadModel(std::vector<SurfaceMesh> interfaces, std::vector<double> conductivities,
                     int skull_index)
    : conductivities_(std::move(conductivities)), skull_index_(skull_index) {
  if (interfaces.empty()) throw ValidationError("head model has no interfaces");
  if (interfaces.size() != conductivities_.size()) {
    throw ValidationError("one conductivity per layer required");
  }
  for (double s : conductivities_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("conductivity must be positive");
  }
  const int n = static_cast<int>(interfaces.size());
  if (skull_index_ != 0 && (skull_index_ < 2 || skull_index_ > n)) {
    throw ValidationError("skull index outside [2, " + std::to_string(n) + "]");
  }
  interfaces_.reserve(interfaces.size());
  for (int i = 0; i < n; ++i) {
    auto& m = interfaces[i];
    if (m.interface_index() == i + 1) {
      interfaces_.push_back(std::move(m));
    } else {
      interfaces_.emplace_back(m.nodes(), m.patches(), i + 1);
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    const SurfaceMesh& inner = interfaces_[i];
    const SurfaceMesh& outer = interfaces_[i + 1];
    for (int p = 0; p < inner.num_patches(); ++p) {
      if (winding_number(outer, inner.center(p)) < 0.5) {
        throw ValidationError("interfaces not nested: S_" + std::to_string(i + 1) +
                              " leaves S_" + std::to_string(i + 2));
      }
    }
    for (int p = 0; p < outer.num_patches(); ++p) {
      if (winding_number(inner, outer.center(p)) > 0.5) {
        throw ValidationError("interfaces not nested: S_" + std::to_string(i + 2) +
                              " enters S_" + std::to_string(i + 1));
      }
    }
  }
}

HeadModel make_sphere_head_model(const std::vector<double>& radii,
                                 const std::vector<double>& conductivities, int skull_index,
                                 double target_h) {
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw ValidationError("radii must increase outward");
  }
  std::vector<SurfaceMesh> meshes;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    meshes.push_back(generate_sphere_mesh(radii[i], target_h, static_cast<int>(i) + 1));
  }
  return HeadModel(std::move(meshes), conductivities, skull_index);
}

}  // namespace nystrom
