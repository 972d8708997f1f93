#pragma once

#include <Eigen/Core>

#include "nystrom/quadrature.hpp"

namespace nystrom {

/// Lagrange basis of total degree `order` anchored at the points of the
/// N_a-point triangle rule (N_a = 1, 3, 6 for orders 0, 1, 2).
class InterpolationRule {
 public:
  /// Throws UnsupportedRule for orders outside {0, 1, 2} and SingularAnchorSet
  /// when the anchors do not determine the basis.
  explicit InterpolationRule(int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(coefficients_.rows()); }
  const TriangleRule& anchors() const { return *anchors_; }
  Eigen::Vector2d anchor(int a) const { return anchors_->points[a]; }
  double weight(int a) const { return anchors_->weights[a]; }

  /// Row a holds the monomial coefficients of L_a.
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  double condition_number() const { return condition_; }

  /// (L_1 .. L_Na) at (alpha, beta).
  Eigen::VectorXd evaluate(double alpha, double beta) const {
    return coefficients_ * monomials(order_, alpha, beta);
  }

  /// 1, a, b, a^2, ab, b^2 truncated to the basis size for `order`.
  static Eigen::VectorXd monomials(int order, double alpha, double beta);

 private:
  int order_;
  const TriangleRule* anchors_;
  Eigen::MatrixXd coefficients_;
  double condition_ = 1.0;
};

InterpolationRule build_interpolation(int order);

Eigen::VectorXd evaluate_basis(const InterpolationRule& rule, double alpha, double beta);

/// Number of anchors for an interpolation order.
int anchors_for_order(int order);

}  // namespace nystrom
