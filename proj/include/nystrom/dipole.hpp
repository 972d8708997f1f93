#pragma once

#include <Eigen/Core>

#include "nystrom/mesh.hpp"

namespace nystrom {

struct Dipole {
  Point3 position = Point3::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
};

/// q.(r - r0) / (4 pi |r - r0|^3)
double v_inc(const Dipole& dipole, const Point3& r);

/// n . grad_r of v_inc / sigma_1.
double v_inc_normal_derivative(const Dipole& dipole, const Point3& r, const Eigen::Vector3d& n,
                               double sigma1);

}  // namespace nystrom
