#pragma once

#include <vector>

#include <Eigen/Core>

namespace nystrom {

/// Symmetric rule on the reference triangle {a >= 0, b >= 0, a + b <= 1}.
/// Weights sum to 1/2, the reference-triangle area.
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule on [-1, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Interior symmetric rules with 1, 3, 6 or 16 points (degrees 1, 2, 4, 8).
/// Throws UnsupportedRule for any other count.
const TriangleRule& triangle_rule(int n_points);

/// The rule copied onto each of the 4^levels congruent subtriangles of the
/// reference triangle, weights scaled to keep the total area.
TriangleRule subdivide(const TriangleRule& rule, int levels);

/// n-point Gauss-Legendre rule, 1 <= n <= 64.
LineRule gauss_legendre(int n);

/// Same rule affinely mapped to [lo, hi].
LineRule gauss_legendre(int n, double lo, double hi);

/// Exact integral of a^m b^n over the reference triangle: m! n! / (m + n + 2)!.
double triangle_monomial_integral(int m, int n);

}  // namespace nystrom
