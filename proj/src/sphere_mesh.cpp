#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Geometry>

#include "nystrom/errors.hpp"
#include "nystrom/mesh.hpp"

namespace nystrom {
namespace {

struct Icosahedron {
  std::array<Eigen::Vector3d, 12> vertices;
  std::array<std::array<int, 3>, 20> faces;
};

Icosahedron unit_icosahedron() {
  const double t = 0.5 * (1.0 + std::sqrt(5.0));
  Icosahedron ico;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (int i = 0; i < 12; ++i) {
    ico.vertices[i] = Eigen::Vector3d(raw[i][0], raw[i][1], raw[i][2]).normalized();
  }
  ico.faces = {{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
  for (auto& f : ico.faces) {
    const Eigen::Vector3d& a = ico.vertices[f[0]];
    const Eigen::Vector3d& b = ico.vertices[f[1]];
    const Eigen::Vector3d& c = ico.vertices[f[2]];
    if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(f[1], f[2]);
  }
  return ico;
}

// Grid nodes are keyed by their barycentric weights over icosahedron vertex
// ids, sorted by id, so nodes on shared edges and corners are built once and
// with identical arithmetic.
using NodeKey = std::array<int, 6>;

class SphereBuilder {
 public:
  SphereBuilder(double radius, int frequency) : radius_(radius), grid_(2 * frequency) {}

  int node(const std::array<int, 3>& ids, int i, int j) {
    std::array<std::pair<int, int>, 3> terms = {
        {{ids[0], grid_ - i - j}, {ids[1], i}, {ids[2], j}}};
    std::sort(terms.begin(), terms.end());
    NodeKey key;
    key.fill(-1);
    int slot = 0;
    for (const auto& [id, w] : terms) {
      if (w == 0) continue;
      key[2 * slot] = id;
      key[2 * slot + 1] = w;
      ++slot;
    }
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(nodes_.size()));
    if (inserted) {
      Eigen::Vector3d p = Eigen::Vector3d::Zero();
      for (int s = 0; s < slot; ++s) p += key[2 * s + 1] * ico_.vertices[key[2 * s]];
      nodes_.push_back(radius_ * p.normalized());
    }
    return it->second;
  }

  SurfaceMesh build(int interface_index) {
    const int n = grid_ / 2;
    std::vector<QuadraticPatch> patches;
    patches.reserve(20 * n * n);
    for (const auto& face : ico_.faces) {
      auto at = [&](int i, int j) { return node(face, i, j); };
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j + i < n; ++j) {
          const int gi = 2 * i;
          const int gj = 2 * j;
          patches.push_back({{at(gi, gj), at(gi + 2, gj), at(gi, gj + 2), at(gi + 1, gj),
                              at(gi + 1, gj + 1), at(gi, gj + 1)}});
          if (i + j + 2 <= n) {
            patches.push_back({{at(gi + 2, gj), at(gi + 2, gj + 2), at(gi, gj + 2),
                                at(gi + 2, gj + 1), at(gi + 1, gj + 2), at(gi + 1, gj + 1)}});
          }
        }
      }
    }
    return SurfaceMesh(std::move(nodes_), std::move(patches), interface_index);
  }

 private:
  Icosahedron ico_ = unit_icosahedron();
  double radius_;
  int grid_;
  std::map<NodeKey, int> index_;
  std::vector<Point3> nodes_;
};

}  // namespace

SurfaceMesh generate_sphere_mesh_frequency(double radius, int frequency, int interface_index) {
  if (!(radius > 0.0) || frequency < 1) {
    throw ValidationError("sphere mesh needs radius > 0 and frequency >= 1");
  }
  return SphereBuilder(radius, frequency).build(interface_index);
}

int sphere_frequency_for(double radius, double target_h) {
  if (!(radius > 0.0) || !(target_h > 0.0) || !(target_h < radius)) {
    throw ValidationError("sphere mesh needs 0 < h < R");
  }
  int best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int n = 1;; ++n) {
    const double h = generate_sphere_mesh_frequency(radius, n).mean_edge_length();
    const double gap = std::abs(h - target_h);
    if (gap < best_gap) {
      best_gap = gap;
      best = n;
    }
    if (h < target_h) break;
  }
  return best;
}

SurfaceMesh generate_sphere_mesh(double radius, double target_h, int interface_index) {
  return generate_sphere_mesh_frequency(radius, sphere_frequency_for(radius, target_h),
                                        interface_index);
}

}  // namespace nystrom
