#include "nystrom/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nystrom/errors.hpp"

namespace nystrom {
namespace {

// Orbits are given in barycentric form; (a, b) below are the last two
// barycentric coordinates, so the first one is 1 - a - b.
class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  RuleBuilder& centroid(double w) {
    push(1.0 / 3.0, 1.0 / 3.0, w);
    return *this;
  }

  // Three points with one barycentric coordinate equal to `a`, the others (1 - a) / 2.
  RuleBuilder& orbit3(double a, double w) {
    const double b = 0.5 * (1.0 - a);
    push(b, b, w);
    push(a, b, w);
    push(b, a, w);
    return *this;
  }

  // Six points, all permutations of (a, b, 1 - a - b).
  RuleBuilder& orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    push(a, b, w);
    push(b, a, w);
    push(b, c, w);
    push(c, b, w);
    push(a, c, w);
    push(c, a, w);
    return *this;
  }

  TriangleRule build() const { return rule_; }

 private:
  void push(double alpha, double beta, double w) {
    rule_.points.emplace_back(alpha, beta);
    rule_.weights.push_back(w);
  }

  TriangleRule rule_;
};

// Nodes refined to 20 digits by Newton iteration on the moment equations.
const TriangleRule kRule1 = RuleBuilder(1).centroid(0.5).build();

const TriangleRule kRule3 = RuleBuilder(2).orbit3(2.0 / 3.0, 1.0 / 6.0).build();

const TriangleRule kRule6 = RuleBuilder(4)
                                .orbit3(0.10810301816807022736, 0.11169079483900573285)
                                .orbit3(0.81684757298045851308, 0.054975871827660933819)
                                .build();

const TriangleRule kRule16 =
    RuleBuilder(8)
        .centroid(0.072157803838893584126)
        .orbit3(0.081414823414553687942, 0.047545817133642312397)
        .orbit3(0.65886138449647958676, 0.051608685267359125141)
        .orbit3(0.89890554336593804908, 0.016229248811599040155)
        .orbit6(0.0083947774099576053372, 0.26311282963463811342, 0.013615157087217497132)
        .build();

}  // namespace

const TriangleRule& triangle_rule(int n_points) {
  switch (n_points) {
    case 1:
      return kRule1;
    case 3:
      return kRule3;
    case 6:
      return kRule6;
    case 16:
      return kRule16;
    default:
      throw UnsupportedRule("no " + std::to_string(n_points) + "-point triangle rule");
  }
}

TriangleRule subdivide(const TriangleRule& rule, int levels) {
  if (levels < 0) throw ValidationError("subdivision level must be >= 0");
  // Each subtriangle as origin plus two edge vectors.
  struct Tri {
    Eigen::Vector2d o, e1, e2;
  };
  std::vector<Tri> tris{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  for (int l = 0; l < levels; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const Eigen::Vector2d a = 0.5 * t.e1, b = 0.5 * t.e2;
      next.push_back({t.o, a, b});
      next.push_back({t.o + a, a, b});
      next.push_back({t.o + b, a, b});
      next.push_back({t.o + a + b, -a, -b});
    }
    tris = std::move(next);
  }
  TriangleRule out;
  out.degree = rule.degree;
  const double scale = 1.0 / static_cast<double>(tris.size());
  for (const auto& t : tris) {
    for (int k = 0; k < rule.size(); ++k) {
      out.points.push_back(t.o + rule.points[k].x() * t.e1 + rule.points[k].y() * t.e2);
      out.weights.push_back(rule.weights[k] * scale);
    }
  }
  return out;
}

LineRule gauss_legendre(int n) {
  if (n < 1 || n > 64) {
    throw UnsupportedRule("Gauss-Legendre rule with " + std::to_string(n) + " points");
  }
  LineRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

LineRule gauss_legendre(int n, double lo, double hi) {
  LineRule rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = mid + half * rule.points[i];
    rule.weights[i] *= half;
  }
  return rule;
}

double triangle_monomial_integral(int m, int n) {
  // m! n! / (m + n + 2)!  =  1 / ((m + n + 2) (m + n + 1) C(m + n, m))
  double value = 1.0 / ((m + n + 2.0) * (m + n + 1.0));
  for (int k = 1; k <= m; ++k) value *= static_cast<double>(k) / (n + k);
  return value;
}

}  // namespace nystrom
