#include "nystrom/interpolation.hpp"

#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "nystrom/errors.hpp"

namespace nystrom {

int anchors_for_order(int order) {
  switch (order) {
    case 0:
      return 1;
    case 1:
      return 3;
    case 2:
      return 6;
    default:
      throw UnsupportedRule("interpolation order " + std::to_string(order));
  }
}

Eigen::VectorXd InterpolationRule::monomials(int order, double alpha, double beta) {
  Eigen::VectorXd m(anchors_for_order(order));
  m[0] = 1.0;
  if (order >= 1) {
    m[1] = alpha;
    m[2] = beta;
  }
  if (order >= 2) {
    m[3] = alpha * alpha;
    m[4] = alpha * beta;
    m[5] = beta * beta;
  }
  return m;
}

InterpolationRule::InterpolationRule(int order)
    : order_(order), anchors_(&triangle_rule(anchors_for_order(order))) {
  const int n = anchors_->size();
  // Column b holds the monomials at anchor b; L = M^{-1} m gives L_a(anchor_b) = delta_ab.
  Eigen::MatrixXd moments(n, n);
  for (int b = 0; b < n; ++b) {
    moments.col(b) = monomials(order, anchors_->points[b].x(), anchors_->points[b].y());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(moments);
  const auto& s = svd.singularValues();
  if (!(s[n - 1] > 1e-12 * s[0])) {
    throw SingularAnchorSet("anchor set of order " + std::to_string(order) +
                            " does not determine the basis");
  }
  condition_ = s[0] / s[n - 1];
  coefficients_ = moments.partialPivLu().inverse();
}

InterpolationRule build_interpolation(int order) { return InterpolationRule(order); }

Eigen::VectorXd evaluate_basis(const InterpolationRule& rule, double alpha, double beta) {
  return rule.evaluate(alpha, beta);
}

}  // namespace nystrom
