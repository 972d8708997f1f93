#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "nystrom/analytic.hpp"
#include "nystrom/errors.hpp"
#include "nystrom/formulations.hpp"

using namespace nystrom;

namespace {

const std::vector<double> kRadii{0.087, 0.092, 0.1};
const Eigen::Vector3d kMoment = Eigen::Vector3d(1, 0, 1).normalized();
const Dipole kDipole{Point3(0.0425, 0, 0), kMoment};

Eigen::VectorXd reference(const HeadModel& model, const std::vector<Observation>& scalp,
                          const Dipole& d) {
  const LayeredSphereModel sphere{kRadii, model.conductivities()};
  Eigen::VectorXd v(scalp.size());
  for (std::size_t k = 0; k < scalp.size(); ++k) {
    v[k] = analytic_surface_potential(sphere, d, scalp[k].point.normalized() * kRadii.back(),
                                      {500, 1e-12});
  }
  return v;
}

double scalp_error(const Discretization& disc, const FormulationRun& run, int i = 0) {
  const auto scalp = disc.scalp_observations();
  return relative_error(recover_potential(disc, run.solutions[i], scalp),
                        reference(disc.model(), scalp, run.solutions[i].dipole));
}

}  // namespace

TEST_CASE("incident potential") {
  const Dipole z{Point3::Zero(), Eigen::Vector3d(0, 0, 1)};
  CHECK(v_inc(z, Point3(0, 0, 1)) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
  CHECK(v_inc(z, Point3(1, 2, 0)) == 0.0);
  CHECK(v_inc(kDipole, Point3(0.1, 0, 0)) ==
        doctest::Approx(std::sqrt(0.5) * 0.0575 / (4.0 * std::numbers::pi * std::pow(0.0575, 3))));
  CHECK(v_inc(kDipole, Point3(0.1, 0, 0)) == doctest::Approx(17.03).epsilon(1e-3));
}

TEST_CASE("normal derivative of the incident potential") {
  const Dipole z{Point3::Zero(), Eigen::Vector3d(0, 0, 1)};
  CHECK(v_inc_normal_derivative(z, Point3(0, 0, 1), Eigen::Vector3d(0, 0, 1), 1.0) ==
        doctest::Approx(-1.0 / (2.0 * std::numbers::pi)));
  CHECK(v_inc_normal_derivative(z, Point3(1, 0, 0), Eigen::Vector3d(0, 0, 1), 1.0) ==
        doctest::Approx(1.0 / (4.0 * std::numbers::pi)));

  std::mt19937 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const double sigma = 0.33, step = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Point3 r = kDipole.position + 0.05 * Eigen::Vector3d(n(gen), n(gen), n(gen)).normalized();
    const Eigen::Vector3d nr = Eigen::Vector3d(n(gen), n(gen), n(gen)).normalized();
    const double fd =
        (v_inc(kDipole, r + step * nr) - v_inc(kDipole, r - step * nr)) / (2.0 * step * sigma);
    const double exact = v_inc_normal_derivative(kDipole, r, nr, sigma);
    CHECK(std::abs(fd - exact) < 1e-6 * std::abs(exact) + 1e-9);
  }
}

TEST_CASE("dof map is a bijection") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.035);
  const DofMap map(model, 6, {1, 3});
  CHECK(map.size() == 6 * (180 + 180));
  CHECK(map.contains(3));
  CHECK_FALSE(map.contains(2));
  CHECK(map.offset(3) == 6 * 180);
  for (int k = 0; k < map.size(); ++k) {
    const auto d = map.dof(k);
    CHECK(map.index(d.interface, d.patch, d.anchor) == k);
  }
  CHECK_THROWS_AS(map.offset(2), ValidationError);
}

TEST_CASE("formulation names") {
  CHECK(parse_formulation("ISADL") == Formulation::ISADL);
  CHECK(parse_formulation("dl") == Formulation::DL);
  CHECK(to_string(Formulation::IADL) == "iadl");
  CHECK_THROWS_AS(parse_formulation("bem"), ValidationError);
}

TEST_CASE("constant density is a null vector of the isolated sphere") {
  const double sigma = 2.0;
  const HeadModel model({generate_sphere_mesh(0.1, 0.02)}, {sigma}, 0);
  const Discretization disc(model, 2);
  const DenseMatrix z = dl_matrix(disc);
  const Vector ones = disc.surface(1).anchor_jacobians();
  const Vector r = z * ones;
  CHECK(r.lpNorm<Eigen::Infinity>() < 1e-2 * 0.5 * sigma);
}

TEST_CASE("zero jump removes the inner columns") {
  const HeadModel model({generate_sphere_mesh(0.09, 0.035), generate_sphere_mesh(0.1, 0.035)},
                        {1.0, 1.0}, 2);
  const Discretization disc(model, 1);
  const DenseMatrix z = dl_matrix(disc);
  const DofMap dofs = disc.all_dofs();
  const int n1 = dofs.block_size(1);
  const auto jac = disc.surface(1).anchor_jacobians();
  for (int r = 0; r < z.rows(); ++r) {
    for (int c = 0; c < n1; ++c) {
      const double expected = r == c ? 1.0 / jac[c] : 0.0;
      CHECK(z(r, c) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(adl_matrix(disc), ConductivityJumpZero);
}

TEST_CASE("jump terms on the diagonals") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.035);
  const Discretization disc(model, 1);
  const DofMap all = disc.all_dofs();
  const DenseMatrix za = adl_matrix(disc);
  const DenseMatrix zi = iadl_matrix(disc);
  const DofMap outer = disc.dofs({2, 3});
  const auto obs = disc.anchor_observations(all);
  for (int k : {0, all.offset(2) + 7, all.offset(3) + 11}) {
    const auto d = all.dof(k);
    const double jac = disc.surface(d.interface).anchor_jacobians()[d.patch * 3 + d.anchor];
    const double self = integral(KernelKind::AdjointObservation, disc.surface(d.interface), obs[k],
                                 d.patch, d.anchor, disc.integrator());
    const double s = model.sigma(d.interface), s1 = model.sigma(d.interface + 1);
    CHECK(za(k, k) + self == doctest::Approx((s + s1) / (2.0 * (s1 - s)) / jac).epsilon(1e-12));
    if (d.interface == 3) CHECK(za(k, k) + self == doctest::Approx(-0.5 / jac).epsilon(1e-12));
    if (d.interface >= 2) {
      const int ki = outer.index(d.interface, d.patch, d.anchor);
      const double sign = d.interface == 3 ? 0.5 : -0.5;
      CHECK(zi(ki, ki) - self == doctest::Approx(sign / jac).epsilon(1e-12));
    }
  }
}

TEST_CASE("isolated stage of a single inner surface") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.035);
  const Discretization disc(model, 0);
  const DenseMatrix z = isadl_isolated_matrix(disc);
  CHECK(z.rows() == 180);
  const auto obs = disc.anchor_observations(disc.dofs({1}));
  const double jac = disc.surface(1).anchor_jacobians()[5];
  const double self =
      integral(KernelKind::DoubleLayerSource, disc.surface(1), obs[5], 5, 0, disc.integrator());
  // sigma~_2 = 0: diagonal sigma_1 / 2 and weight sigma_1.
  CHECK(z(5, 5) == doctest::Approx(0.5 / jac + self).epsilon(1e-12));
}

TEST_CASE("solve on small systems") {
  AssembledSystem s;
  s.matrix = DenseMatrix::Identity(3, 3);
  s.rhs = Vector::LinSpaced(3, 1, 3);
  SolveReport rep;
  CHECK(solve(s, &rep).coefficients == s.rhs);
  CHECK(rep.residual == 0.0);
  s.matrix = DenseMatrix::Zero(2, 2);
  s.matrix(0, 0) = 2;
  s.matrix(1, 1) = 4;
  s.rhs = Vector(2);
  s.rhs << 2, 8;
  const auto x = solve(s).coefficients;
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);
}

TEST_CASE("density evaluation on a flat patch") {
  const Point3 v1(0, 0, 0), v2(1, 0, 0), v3(0, 1, 0);
  const SurfaceMesh mesh({v1, v2, v3, 0.5 * (v1 + v2), 0.5 * (v2 + v3), 0.5 * (v3 + v1)},
                         {QuadraticPatch{{0, 1, 2, 3, 4, 5}}}, 1);
  const HeadModel model({generate_sphere_mesh(0.1, 0.035)}, {1.0}, 0);
  SurfaceDensity d;
  d.dofs = DofMap(model, 1, {1});
  d.coefficients = Vector::Constant(d.dofs.size(), 2.5);
  const InterpolationRule rule(0);
  CHECK(d.value_at(mesh, rule, 0, 1.0 / 3.0, 1.0 / 3.0) == doctest::Approx(2.5));
}

TEST_CASE("recovery special cases") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.035);
  const Discretization disc(model, 1);
  const auto scalp = disc.scalp_observations();

  Solution adl{Formulation::ADL, kDipole, {}};
  SurfaceDensity xi;
  xi.kind = DensityKind::Xi;
  xi.dofs = disc.all_dofs();
  xi.coefficients = Vector::Zero(xi.dofs.size());
  adl.densities.push_back(xi);
  const Vector v = recover_potential(disc, adl, scalp);
  for (std::size_t k = 0; k < scalp.size(); ++k) {
    CHECK(v[k] == doctest::Approx(v_inc(kDipole, scalp[k].point) / model.sigma(1)));
  }

  Solution isa{Formulation::ISADL, kDipole, {}};
  SurfaceDensity vi;
  vi.kind = DensityKind::VIsa;
  vi.dofs = disc.dofs({1});
  vi.coefficients = Vector::Random(vi.dofs.size());
  SurfaceDensity vc;
  vc.kind = DensityKind::VCorr;
  vc.dofs = disc.all_dofs();
  vc.coefficients = Vector::Zero(vc.dofs.size());
  isa.densities = {vi, vc};
  CHECK(recover_potential(disc, isa, scalp).lpNorm<Eigen::Infinity>() == 0.0);

  const AssembledSystem zero = assemble_iadl(disc, xi);
  CHECK(zero.rhs.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(solve(zero).coefficients.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("sphere model accuracy at a moderate mesh") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.03);
  const Discretization disc(model, 2);
  const auto runs = run_formulations(disc, {Formulation::DL, Formulation::ADL}, {kDipole});
  const double e_dl = scalp_error(disc, runs[0]);
  const double e_adl = scalp_error(disc, runs[1]);
  MESSAGE("h=0.03 errors: dl " << e_dl << ", adl " << e_adl);
  CHECK(e_dl < 0.10);
  CHECK(e_adl < 0.10);
  CHECK(runs[0].residual < 1e-10);
  CHECK(runs[1].residual < 1e-10);
}

TEST_CASE("isolation is exact without a conductivity contrast") {
  const auto model = make_sphere_head_model(kRadii, {0.33, 0.33, 0.33}, 2, 0.03);
  const Discretization disc(model, 2);
  const auto runs = run_formulations(disc, {Formulation::DL, Formulation::ISADL}, {kDipole});
  const auto scalp = disc.scalp_observations();
  const Vector a = recover_potential(disc, runs[0].solutions[0], scalp);
  const Vector b = recover_potential(disc, runs[1].solutions[0], scalp);
  CHECK(relative_error(b, a) < 1e-6);
}

TEST_CASE("linearity in the dipole") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.035);
  const Discretization disc(model, 1);
  const Dipole d1 = kDipole;
  const Dipole d2{kDipole.position, 2.0 * kDipole.moment};
  const Dipole d3{Point3(0.01, 0.02, -0.03), Eigen::Vector3d(0.2, -0.7, 0.1)};
  const Dipole sum{Point3::Zero(), Eigen::Vector3d::Zero()};
  const auto scalp = disc.scalp_observations();
  for (auto f : {Formulation::DL, Formulation::ADL, Formulation::ISADL, Formulation::IADL}) {
    CAPTURE(to_string(f));
    const auto run = run_formulation(disc, f, {d1, d2, d3});
    const Vector v1 = recover_potential(disc, run.solutions[0], scalp);
    const Vector v2 = recover_potential(disc, run.solutions[1], scalp);
    const Vector v3 = recover_potential(disc, run.solutions[2], scalp);
    CHECK((v2 - 2.0 * v1).lpNorm<Eigen::Infinity>() <= 1e-12 * v1.lpNorm<Eigen::Infinity>());

    // Superposition through the densities of the two dipoles.
    Solution both = run.solutions[0];
    for (std::size_t k = 0; k < both.densities.size(); ++k) {
      both.densities[k].coefficients += run.solutions[2].densities[k].coefficients;
    }
    both.dipole = sum;
    const Vector incident = [&] {
      Vector w(scalp.size());
      for (std::size_t k = 0; k < scalp.size(); ++k) {
        w[k] = (v_inc(d1, scalp[k].point) + v_inc(d3, scalp[k].point)) / model.sigma(1);
      }
      return w;
    }();
    Vector vs = recover_potential(disc, both, scalp);
    if (f == Formulation::ADL) vs += incident;
    CHECK((vs - (v1 + v3)).lpNorm<Eigen::Infinity>() <= 1e-12 * (v1 + v3).lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("rotated source on the same mesh") {
  const auto model = make_sphere_head_model(kRadii, {1, 0.025, 1}, 2, 0.03);
  const Discretization disc(model, 2);
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(0.2, 1.0, -0.4).normalized()).toRotationMatrix();
  const Dipole turned{rot * kDipole.position, rot * kDipole.moment};
  const auto runs = run_formulation(disc, Formulation::DL, {kDipole, turned});
  const auto scalp = disc.scalp_observations();
  const Vector ref = reference(model, scalp, kDipole);
  const double e0 = relative_error(recover_potential(disc, runs.solutions[0], scalp), ref);

  // The rotated problem read out at rotated points reproduces the original.
  std::vector<Observation> back;
  for (const auto& o : scalp) back.push_back(observation_at(rot.transpose() * o.point));
  const Vector turned_num = recover_potential(disc, runs.solutions[1], scalp);
  const Vector turned_ref = reference(model, back, kDipole);
  const double e1 = relative_error(turned_num, turned_ref);
  MESSAGE("rotation errors " << e0 << " " << e1);
  CHECK(e1 <= 2.0 * e0);
}
