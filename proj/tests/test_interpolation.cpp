#include <doctest.h>

#include <random>

#include "nystrom/errors.hpp"
#include "nystrom/interpolation.hpp"

using namespace nystrom;

namespace {

Eigen::Vector2d random_point(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(gen), b = u(gen);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {a, b};
}

}  // namespace

TEST_CASE("order zero is the constant one") {
  const auto rule = build_interpolation(0);
  REQUIRE(rule.size() == 1);
  std::mt19937 gen(1);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_point(gen);
    CHECK(evaluate_basis(rule, p.x(), p.y())[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("delta property at the anchors") {
  for (int order : {0, 1, 2}) {
    const auto rule = build_interpolation(order);
    CHECK(rule.size() == anchors_for_order(order));
    for (int b = 0; b < rule.size(); ++b) {
      const auto v = rule.evaluate(rule.anchor(b).x(), rule.anchor(b).y());
      for (int a = 0; a < rule.size(); ++a) {
        CHECK(std::abs(v[a] - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
  const auto rule = build_interpolation(2);
  CHECK(rule.evaluate(rule.anchor(2).x(), rule.anchor(2).y())[2] == doctest::Approx(1.0));
  CHECK(std::abs(rule.evaluate(rule.anchor(4).x(), rule.anchor(4).y())[2]) < 1e-12);
}

TEST_CASE("linear reproduction at a fixed point") {
  const auto rule = build_interpolation(2);
  double sum = 0.0;
  const auto v = evaluate_basis(rule, 0.2, 0.3);
  for (int a = 0; a < rule.size(); ++a) {
    const auto x = rule.anchor(a);
    sum += (x.x() + 2.0 * x.y()) * v[a];
  }
  CHECK(std::abs(sum - 0.8) < 1e-12);
}

TEST_CASE("polynomial reproduction and partition of unity") {
  std::mt19937 gen(7);
  for (int order : {0, 1, 2}) {
    const auto rule = build_interpolation(order);
    CHECK(rule.condition_number() >= 1.0);
    CHECK(rule.condition_number() < 1e3);
    for (int m = 0; m <= order; ++m) {
      for (int n = 0; m + n <= order; ++n) {
        for (int t = 0; t < 50; ++t) {
          const auto p = random_point(gen);
          const auto v = rule.evaluate(p.x(), p.y());
          double s = 0.0, unity = 0.0;
          for (int a = 0; a < rule.size(); ++a) {
            s += std::pow(rule.anchor(a).x(), m) * std::pow(rule.anchor(a).y(), n) * v[a];
            unity += v[a];
          }
          CHECK(std::abs(s - std::pow(p.x(), m) * std::pow(p.y(), n)) < 1e-11);
          CHECK(std::abs(unity - 1.0) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("anchors are the points of the same-size quadrature rule") {
  const auto rule = build_interpolation(1);
  const auto& q = triangle_rule(3);
  for (int a = 0; a < 3; ++a) {
    CHECK(rule.anchor(a) == q.points[a]);
    CHECK(rule.weight(a) == q.weights[a]);
  }
}

TEST_CASE("unsupported interpolation order") {
  CHECK_THROWS_AS(build_interpolation(3), UnsupportedRule);
  CHECK_THROWS_AS(build_interpolation(-1), UnsupportedRule);
  CHECK_THROWS_AS(anchors_for_order(3), UnsupportedRule);
}
