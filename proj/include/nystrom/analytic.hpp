#pragma once

#include <vector>

#include <Eigen/Core>

#include "nystrom/dipole.hpp"
#include "nystrom/mesh.hpp"

namespace nystrom {

/// Concentric spheres R_1 < ... < R_N with conductivities sigma_1..sigma_N,
/// zero-conductivity exterior.
struct LayeredSphereModel {
  std::vector<double> radii;
  std::vector<double> conductivities;

  void validate() const;
};

struct SeriesControl {
  int max_degree = 100;
  /// Relative tail bound for truncation. <= 0 sums exactly max_degree terms.
  double tolerance = 1e-10;
};

/// Potential on the outer sphere for a dipole in the innermost layer.
/// Throws SeriesNotConverged when the tail estimate still exceeds the
/// tolerance at max_degree.
double analytic_surface_potential(const LayeredSphereModel& model, const Dipole& dipole,
                                  const Point3& r, const SeriesControl& ctrl = {});

/// Closed form for a dipole in a homogeneous sphere of radius R, r on the sphere.
double homogeneous_sphere_potential(double radius, double sigma, const Dipole& dipole,
                                    const Point3& r);

/// sqrt(sum |ref~ - num~|^2 / sum |ref~|^2) after subtracting each mean.
/// Throws DegenerateReference when the de-meaned reference vanishes.
double relative_error(const Eigen::VectorXd& numerical, const Eigen::VectorXd& reference);

}  // namespace nystrom
