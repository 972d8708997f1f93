#include <doctest.h>

#include <random>
#include <thread>

#include "nystrom/errors.hpp"
#include "nystrom/linalg.hpp"

using namespace nystrom;

namespace {

DenseMatrix random_matrix(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = u(gen);
  }
  a.diagonal().array() += n;
  return a;
}

}  // namespace

TEST_CASE("identity returns the right-hand side") {
  const DenseMatrix id = DenseMatrix::Identity(4, 4);
  const Vector b = Vector::LinSpaced(4, 1.0, 4.0);
  CHECK(lu_solve(lu_factor(id), b) == b);
}

TEST_CASE("diagonal system") {
  DenseMatrix a(2, 2);
  a << 2, 0, 0, 4;
  const Vector x = lu_solve(lu_factor(a), Vector::Map(std::vector<double>{2, 8}.data(), 2));
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);
}

TEST_CASE("Hilbert matrix against its exact inverse") {
  const int n = 5;
  DenseMatrix h(n, n);
  Eigen::MatrixXd inv(n, n);
  auto binom = [](int m, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h(i, j) = 1.0 / (i + j + 1);
      const int I = i + 1, J = j + 1;
      inv(i, j) = ((I + J) % 2 ? -1.0 : 1.0) * (I + J - 1) * binom(n + I - 1, n - J) *
                  binom(n + J - 1, n - I) * binom(I + J - 2, I - 1) * binom(I + J - 2, I - 1);
    }
  }
  const Eigen::MatrixXd x = lu_factor(h).solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));
  CHECK((x - inv).norm() / inv.norm() < 1e-8);
}

TEST_CASE("residual on a random system") {
  const DenseMatrix a = random_matrix(500, 3);
  const Vector b = Vector::Random(500);
  const Vector x = lu_solve(lu_factor(a), b);
  CHECK(relative_residual(a, x, b) < 1e-10);
}

TEST_CASE("random system against an independent inverse") {
  const DenseMatrix a = random_matrix(100, 9);
  const Vector b = Vector::Random(100);
  const Eigen::MatrixXd inv = Eigen::MatrixXd(a).fullPivLu().inverse();
  const Vector ref = inv * b;
  CHECK((lu_solve(lu_factor(a), b) - ref).norm() / ref.norm() < 1e-10);
}

TEST_CASE("unit vectors are recovered") {
  const DenseMatrix a = random_matrix(200, 17);
  const LuFactorization lu(a);
  for (int k : {0, 57, 199}) {
    const Vector e = Vector::Unit(200, k);
    CHECK((lu.solve(Vector(a * e)) - e).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("concurrent solves against one factorization") {
  const DenseMatrix a = random_matrix(150, 21);
  const LuFactorization lu(a);
  std::vector<Vector> rhs, out(4);
  for (int t = 0; t < 4; ++t) rhs.push_back(Vector::Random(150));
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) pool.emplace_back([&, t] { out[t] = lu.solve(rhs[t]); });
  for (auto& th : pool) th.join();
  for (int t = 0; t < 4; ++t) CHECK(relative_residual(a, out[t], rhs[t]) < 1e-12);
}

TEST_CASE("singular matrices") {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  CHECK_THROWS_AS(lu_factor(a), SingularMatrix);
  DenseMatrix b = DenseMatrix::Identity(2, 2);
  b(0, 1) = std::nan("");
  CHECK_THROWS_AS(lu_factor(b), SingularMatrix);
}
