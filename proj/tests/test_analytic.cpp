#include <doctest.h>

#include <cmath>
#include <random>

#include "nystrom/analytic.hpp"
#include "nystrom/errors.hpp"

using namespace nystrom;

namespace {

const LayeredSphereModel kHead{{0.087, 0.092, 0.1}, {1.0, 0.025, 1.0}};

Eigen::Vector3d random_unit(std::mt19937& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Eigen::Vector3d(n(gen), n(gen), n(gen)).normalized();
}

}  // namespace

TEST_CASE("closed form agrees with a long series for one layer") {
  const LayeredSphereModel one{{0.1}, {0.33}};
  const Dipole d{Point3(0.02, -0.01, 0.03), Eigen::Vector3d(0.3, 0.5, -0.8)};
  std::mt19937 gen(2);
  for (int i = 0; i < 10; ++i) {
    const Point3 r = 0.1 * random_unit(gen);
    const double closed = homogeneous_sphere_potential(0.1, 0.33, d, r);
    const double series = analytic_surface_potential(one, d, r, {2000, 0.0});
    CHECK(std::abs(series - closed) < 1e-10 * std::abs(closed) + 1e-12);
  }
}

TEST_CASE("homogeneous limit of the layered series") {
  const LayeredSphereModel same{{0.087, 0.092, 0.1}, {0.7, 0.7, 0.7}};
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(0.0, 0.8 * 0.087);
  for (int i = 0; i < 20; ++i) {
    const Dipole d{u(gen) * random_unit(gen), random_unit(gen)};
    const Point3 r = 0.1 * random_unit(gen);
    const double closed = homogeneous_sphere_potential(0.1, 0.7, d, r);
    const double series = analytic_surface_potential(same, d, r, {1000, 1e-14});
    CHECK(std::abs(series - closed) <= 1e-8 * std::abs(closed));
  }
}

TEST_CASE("central radial dipole") {
  const LayeredSphereModel one{{0.1}, {1.0}};
  const Dipole d{Point3::Zero(), Eigen::Vector3d(0, 0, 1)};
  const double top = analytic_surface_potential(one, d, Point3(0, 0, 0.1));
  const double bottom = analytic_surface_potential(one, d, Point3(0, 0, -0.1));
  CHECK(top / bottom == doctest::Approx(-1.0).epsilon(1e-15));
  const double side = analytic_surface_potential(one, d, Point3(0.1, 0, 0));
  CHECK(std::abs(side) < 1e-12 * std::abs(top));
  CHECK(top == doctest::Approx(3.0 / (4.0 * std::numbers::pi * 0.01)).epsilon(1e-12));
}

TEST_CASE("mirror symmetry through the x-z plane") {
  const Dipole d{Point3(0.03, 0.01, 0.02), Eigen::Vector3d(0.6, 0.0, -0.8)};
  const Dipole m{Point3(0.03, -0.01, 0.02), Eigen::Vector3d(0.6, 0.0, -0.8)};
  const Point3 r = Point3(0.3, 0.5, 0.2).normalized() * 0.1;
  const Point3 rm(r.x(), -r.y(), r.z());
  CHECK(analytic_surface_potential(kHead, d, r) ==
        doctest::Approx(analytic_surface_potential(kHead, m, rm)).epsilon(1e-12));
}

TEST_CASE("series self-convergence over the sweep configurations") {
  std::mt19937 gen(8);
  const Eigen::Vector3d q = Eigen::Vector3d(1, 0, 1).normalized();
  for (double x0 : {0.001, 0.0425, 0.075, 0.08, 0.084}) {
    for (double s2 : {0.5, 0.025, 0.0025, 0.001}) {
      const LayeredSphereModel model{{0.087, 0.092, 0.1}, {1.0, s2, 1.0}};
      const Dipole d{Point3(x0, 0, 0), q};
      for (int i = 0; i < 5; ++i) {
        const Point3 r = 0.1 * random_unit(gen);
        const double a = analytic_surface_potential(model, d, r, {250, 0.0});
        const double b = analytic_surface_potential(model, d, r, {500, 0.0});
        CHECK(std::abs(a - b) < 1e-9 * std::abs(b) + 1e-12);
      }
    }
  }
}

TEST_CASE("series truncation control") {
  const Dipole d{Point3(0.084, 0, 0), Eigen::Vector3d(1, 0, 0)};
  CHECK_THROWS_AS(analytic_surface_potential(kHead, d, Point3(0.1, 0, 0), {5, 1e-10}),
                  SeriesNotConverged);
  CHECK_NOTHROW(analytic_surface_potential(kHead, d, Point3(0.1, 0, 0), {5, 0.0}));
  CHECK_THROWS_AS(analytic_surface_potential(kHead, d, Point3(0.099, 0, 0)), ValidationError);
  CHECK_THROWS_AS(analytic_surface_potential(kHead, Dipole{Point3(0.09, 0, 0), {}},
                                             Point3(0.1, 0, 0)),
                  ValidationError);
  CHECK_THROWS_AS(analytic_surface_potential(kHead, d, Point3(0.1, 0, 0), {0, 1e-10}),
                  ValidationError);
}

TEST_CASE("relative error examples") {
  Eigen::VectorXd ref(2), num(2);
  ref << 1, -1;
  num << 2, -2;
  CHECK(relative_error(num, ref) == doctest::Approx(1.0));
  CHECK(relative_error(ref, ref) == 0.0);
  Eigen::VectorXd shifted = ref.array() + 5.0;
  CHECK(std::abs(relative_error(shifted, ref)) < 1e-15);
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(3, 2.0);
  CHECK_THROWS_AS(relative_error(Eigen::VectorXd::Zero(3), flat), DegenerateReference);
  CHECK_THROWS_AS(relative_error(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)),
                  ValidationError);
}

TEST_CASE("relative error invariances") {
  std::mt19937 gen(12);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd ref(30), num(30);
  for (int i = 0; i < 30; ++i) {
    ref[i] = n(gen);
    num[i] = ref[i] + 0.1 * n(gen);
  }
  const double e = relative_error(num, ref);
  CHECK(relative_error(num.array() + 3.0, ref.array() + 3.0) == doctest::Approx(e).epsilon(1e-12));
  CHECK(relative_error(4.0 * num, 4.0 * ref) == doctest::Approx(e).epsilon(1e-12));
}
