#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace nystrom {

using Point3 = Eigen::Vector3d;

/// Node coordinates of one patch, one column per node in the fixed ordering
/// (vertices 1, 2, 3 counterclockwise about the outward normal, then the
/// midside nodes of edges 1-2, 2-3, 3-1).
template <typename Scalar>
using PatchNodesT = Eigen::Matrix<Scalar, 3, 6>;
using PatchNodes = PatchNodesT<double>;

/// Quadratic shape functions on the reference triangle. Vertex 1 sits at
/// (0, 0), vertex 2 at (1, 0), vertex 3 at (0, 1).
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> shape_functions(Scalar alpha, Scalar beta) {
  const Scalar l1 = Scalar(1) - alpha - beta;
  const Scalar l2 = alpha;
  const Scalar l3 = beta;
  Eigen::Matrix<Scalar, 6, 1> n;
  n << l1 * (Scalar(2) * l1 - Scalar(1)), l2 * (Scalar(2) * l2 - Scalar(1)),
      l3 * (Scalar(2) * l3 - Scalar(1)), Scalar(4) * l1 * l2, Scalar(4) * l2 * l3,
      Scalar(4) * l3 * l1;
  return n;
}

/// Columns are d/dalpha and d/dbeta of the shape functions.
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 2> shape_derivatives(Scalar alpha, Scalar beta) {
  const Scalar l1 = Scalar(1) - alpha - beta;
  const Scalar l2 = alpha;
  const Scalar l3 = beta;
  Eigen::Matrix<Scalar, 6, 2> d;
  d << -(Scalar(4) * l1 - Scalar(1)), -(Scalar(4) * l1 - Scalar(1)),  //
      Scalar(4) * l2 - Scalar(1), Scalar(0),                          //
      Scalar(0), Scalar(4) * l3 - Scalar(1),                          //
      Scalar(4) * (l1 - l2), -Scalar(4) * l2,                         //
      Scalar(4) * l3, Scalar(4) * l2,                                 //
      -Scalar(4) * l3, Scalar(4) * (l1 - l3);
  return d;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> map_to_cartesian(const PatchNodesT<Scalar>& nodes, Scalar alpha,
                                             Scalar beta) {
  return nodes * shape_functions(alpha, beta);
}

/// Position, tangents and surface measure of a patch at one parametric point.
struct SurfaceFrame {
  Point3 position;
  Eigen::Vector3d d_alpha;
  Eigen::Vector3d d_beta;
  Eigen::Vector3d normal;  // unit
  double jacobian = 0.0;   // |d_alpha x d_beta|
};

SurfaceFrame surface_frame(const PatchNodes& nodes, double alpha, double beta);

struct JacobianNormal {
  double jacobian;
  Eigen::Vector3d normal;
};

/// Throws DegeneratePatch (patch id -1) when the jacobian is <= eps.
JacobianNormal jacobian_and_normal(const PatchNodes& nodes, double alpha, double beta,
                                   double eps = 1e-14);

struct QuadraticPatch {
  std::array<int, 6> nodes;
};

/// Closed surface of curved six-node triangles. Immutable once built.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;
  /// Checks node indices; topology and orientation are checked by validate_mesh.
  SurfaceMesh(std::vector<Point3> nodes, std::vector<QuadraticPatch> patches,
              int interface_index);

  const std::vector<Point3>& nodes() const { return nodes_; }
  const std::vector<QuadraticPatch>& patches() const { return patches_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_patches() const { return static_cast<int>(patches_.size()); }
  int interface_index() const { return interface_index_; }

  const PatchNodes& patch_nodes(int p) const { return geometry_[p]; }
  Point3 map(int p, double alpha, double beta) const {
    return map_to_cartesian(geometry_[p], alpha, beta);
  }
  SurfaceFrame frame(int p, double alpha, double beta) const {
    return surface_frame(geometry_[p], alpha, beta);
  }
  Point3 center(int p) const { return map(p, 1.0 / 3.0, 1.0 / 3.0); }

  /// Mean chord length over the unique vertex-to-vertex edges.
  double mean_edge_length() const { return mean_edge_length_; }

 private:
  std::vector<Point3> nodes_;
  std::vector<QuadraticPatch> patches_;
  std::vector<PatchNodes, Eigen::aligned_allocator<PatchNodes>> geometry_;
  int interface_index_ = 0;
  double mean_edge_length_ = 0.0;
};

/// Curved area by the 16-point rule.
double surface_area(const SurfaceMesh& mesh);

/// Signed enclosed volume, (1/3) of the flux of r through the surface.
double enclosed_volume(const SurfaceMesh& mesh);

/// Solid angle subtended by the surface at x over 4 pi: ~1 inside, ~0 outside.
double winding_number(const SurfaceMesh& mesh, const Point3& x);

/// Watertightness, consistent orientation, outward normals and non-degenerate
/// jacobians. Throws ValidationError naming the failed check.
void validate_mesh(const SurfaceMesh& mesh, double jacobian_eps = 1e-14);

/// Icosahedron of the given frequency (20 n^2 patches) with every node
/// projected radially onto the sphere.
SurfaceMesh generate_sphere_mesh_frequency(double radius, int frequency, int interface_index = 1);

/// Frequency whose mean edge length is closest to target_h.
int sphere_frequency_for(double radius, double target_h);

SurfaceMesh generate_sphere_mesh(double radius, double target_h, int interface_index = 1);

/// Text format: header `nystrom-mesh v1 <n_nodes> <n_patches> <interface_index>`,
/// then one `x y z` line per node, then six zero-based node indices per patch.
SurfaceMesh read_mesh(std::istream& in);
void write_mesh(const SurfaceMesh& mesh, std::ostream& out);
/// load_mesh also runs validate_mesh.
SurfaceMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path);

/// Nested interfaces S_1 (innermost) .. S_N with layer conductivities. The
/// medium outside S_N has zero conductivity and is not stored.
class HeadModel {
 public:
  /// skull_index is K in [2, N], or 0 for models without a skull layer.
  /// Interface indices of the meshes are renumbered 1..N.
  HeadModel(std::vector<SurfaceMesh> interfaces, std::vector<double> conductivities,
            int skull_index);

  int layers() const { return static_cast<int>(interfaces_.size()); }
  /// 1-based.
  const SurfaceMesh& interface(int i) const { return interfaces_[i - 1]; }
  const std::vector<SurfaceMesh>& interfaces() const { return interfaces_; }
  /// 1-based; sigma(layers() + 1) is the zero exterior conductivity.
  double sigma(int i) const {
    return i > layers() ? 0.0 : conductivities_[i - 1];
  }
  const std::vector<double>& conductivities() const { return conductivities_; }
  int skull_index() const { return skull_index_; }

 private:
  std::vector<SurfaceMesh> interfaces_;
  std::vector<double> conductivities_;
  int skull_index_;
};

/// Concentric generated spheres, each meshed independently at target_h.
HeadModel make_sphere_head_model(const std::vector<double>& radii,
                                 const std::vector<double>& conductivities, int skull_index,
                                 double target_h);

}  // namespace nystrom
