#include "nystrom/analytic.hpp"

#include <cmath>
#include <numbers>

#include "nystrom/errors.hpp"

namespace nystrom {

double v_inc(const Dipole& dipole, const Point3& r) {
  const Eigen::Vector3d d = r - dipole.position;
  const double n = d.norm();
  return dipole.moment.dot(d) / (4.0 * std::numbers::pi * n * n * n);
}

double v_inc_normal_derivative(const Dipole& dipole, const Point3& r, const Eigen::Vector3d& n,
                               double sigma1) {
  const Eigen::Vector3d d = r - dipole.position;
  const double r2 = d.squaredNorm();
  const double r1 = std::sqrt(r2);
  const double r3 = r2 * r1;
  const Eigen::Vector3d grad = dipole.moment / r3 - 3.0 * dipole.moment.dot(d) * d / (r3 * r2);
  return n.dot(grad) / (4.0 * std::numbers::pi * sigma1);
}

void LayeredSphereModel::validate() const {
  if (radii.empty() || radii.size() != conductivities.size()) {
    throw ValidationError("sphere model needs one conductivity per radius");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw ValidationError("sphere radii must be positive and increasing");
    }
    if (!(conductivities[i] > 0.0)) throw ValidationError("conductivity must be positive");
  }
}

double analytic_surface_potential(const LayeredSphereModel& model, const Dipole& dipole,
                                  const Point3& r, const SeriesControl& ctrl) {
  model.validate();
  if (ctrl.max_degree < 1) throw ValidationError("series max_degree must be >= 1");
  const int n = static_cast<int>(model.radii.size());
  const double outer = model.radii.back();
  if (std::abs(r.norm() - outer) > 1e-9 * outer) {
    throw ValidationError("evaluation point is not on the outer sphere");
  }
  const double r0n = dipole.position.norm();
  if (!(r0n < model.radii.front())) throw ValidationError("dipole outside the innermost sphere");

  std::vector<double> rho(n);
  for (int k = 0; k < n; ++k) rho[k] = model.radii[k] / outer;
  const double rho0 = r0n / outer;
  const Eigen::Vector3d rhat = r / r.norm();
  const Eigen::Vector3d& q = dipole.moment;
  // A centred dipole only excites l = 1.
  const Eigen::Vector3d r0hat =
      r0n > 0.0 ? Eigen::Vector3d(dipole.position / r0n) : Eigen::Vector3d::Zero();
  const double u = r0n > 0.0 ? rhat.dot(r0hat) : 0.0;
  const double q_r0 = q.dot(r0hat);
  const double q_r = q.dot(rhat);
  const double qn = q.norm();

  double p_prev = 1.0, p_cur = u;   // P_{l-1}, P_l
  double dp_prev = 0.0, dp_cur = 1.0;  // P'_{l-1}, P'_l
  double sum = 0.0, abs_sum = 0.0;
  double tail = 0.0;
  for (int l = 1; l <= ctrl.max_degree; ++l) {
    // Radial solution with unit value and zero flux at the outer sphere, carried
    // inwards as local coefficients of (rho / rho_k)^l and (rho / rho_k)^-(l+1).
    const double dl = l;
    double x = (dl + 1.0) / (2.0 * dl + 1.0);
    double y = dl / (2.0 * dl + 1.0);
    double log_scale = 0.0;
    double at = 1.0;
    for (int k = n - 1; k >= 1; --k) {
      const double ratio = rho[k - 1] / at;
      x *= std::pow(ratio, dl);
      y *= std::pow(1.0 / ratio, dl + 1.0);
      at = rho[k - 1];
      const double v = x + y;
      const double f =
          model.conductivities[k] / model.conductivities[k - 1] * (dl * x - (dl + 1.0) * y);
      x = ((dl + 1.0) * v + f) / (2.0 * dl + 1.0);
      y = (dl * v - f) / (2.0 * dl + 1.0);
      const double s = std::max(std::abs(x), std::abs(y));
      x /= s;
      y /= s;
      log_scale += std::log(s);
    }
    // y is the local rho^-(l+1) coefficient at rho_1, scaled by exp(-log_scale).
    const double rho1 = rho[0];
    const double log_g = (dl - 1.0) * (r0n > 0.0 ? std::log(rho0 / rho1) : 0.0) -
                         2.0 * std::log(rho1) - std::log(std::abs(y)) - log_scale;
    double g = std::exp(log_g) * (y < 0.0 ? -1.0 : 1.0);
    if (r0n == 0.0 && l > 1) g = 0.0;

    const double s_hat = dl * p_cur * q_r0 + dp_cur * (q_r - u * q_r0);
    const double term = g * s_hat;
    sum += term;
    abs_sum += std::abs(term);

    const double envelope = std::abs(g) * qn * (dl + dl * (dl + 1.0));
    const double ratio = rho0 * std::pow((dl + 2.0) / (dl + 1.0), 2);
    tail = ratio < 1.0 ? envelope * ratio / (1.0 - ratio) : HUGE_VAL;
    if (r0n == 0.0) tail = 0.0;
    if (ctrl.tolerance > 0.0 && tail <= ctrl.tolerance * abs_sum) {
      return sum / (4.0 * std::numbers::pi * model.conductivities[0] * outer * outer);
    }

    const double p_next = ((2.0 * dl + 1.0) * u * p_cur - dl * p_prev) / (dl + 1.0);
    const double dp_next = dp_prev + (2.0 * dl + 1.0) * p_cur;
    p_prev = p_cur;
    p_cur = p_next;
    dp_prev = dp_cur;
    dp_cur = dp_next;
  }
  if (ctrl.tolerance > 0.0) {
    throw SeriesNotConverged(ctrl.max_degree, abs_sum > 0.0 ? tail / abs_sum : tail);
  }
  return sum / (4.0 * std::numbers::pi * model.conductivities[0] * outer * outer);
}

double homogeneous_sphere_potential(double radius, double sigma, const Dipole& dipole,
                                    const Point3& r) {
  const Eigen::Vector3d d = r - dipole.position;
  const double dn = d.norm();
  const Eigen::Vector3d rhat = r / r.norm();
  const Eigen::Vector3d& q = dipole.moment;
  const double direct = 2.0 * q.dot(d) / (dn * dn * dn);
  const double image = (q.dot(rhat) + q.dot(d) / dn) /
                       (radius * (radius - rhat.dot(dipole.position) + dn));
  return (direct + image) / (4.0 * std::numbers::pi * sigma);
}

double relative_error(const Eigen::VectorXd& numerical, const Eigen::VectorXd& reference) {
  if (numerical.size() != reference.size() || reference.size() < 2) {
    throw ValidationError("relative error needs two equal-length lists of >= 2 values");
  }
  const Eigen::VectorXd ref = reference.array() - reference.mean();
  const Eigen::VectorXd num = numerical.array() - numerical.mean();
  const double denom = ref.squaredNorm();
  if (!(denom > 0.0)) throw DegenerateReference("de-meaned reference potential is zero");
  return std::sqrt((ref - num).squaredNorm() / denom);
}

}  // namespace nystrom
