#include "nystrom/linalg.hpp"

#include <cmath>

#include "nystrom/errors.hpp"

namespace nystrom {

LuFactorization::LuFactorization(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("LU needs a square matrix");
  if (!a.allFinite()) throw SingularMatrix(-1);
  lu_.compute(a);
  const auto& u = lu_.matrixLU();
  if (a.rows() == 0) return;
  const double scale = a.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    const double pivot = std::abs(u(k, k));
    if (!(pivot > 1e-14 * scale)) throw SingularMatrix(k);
  }
}

Vector LuFactorization::solve(const Vector& b) const { return lu_.solve(b); }

Eigen::MatrixXd LuFactorization::solve(const Eigen::MatrixXd& b) const { return lu_.solve(b); }

LuFactorization lu_factor(const DenseMatrix& a) { return LuFactorization(a); }

Vector lu_solve(const LuFactorization& f, const Vector& b) { return f.solve(b); }

double relative_residual(const DenseMatrix& a, const Vector& x, const Vector& b) {
  const double r = (a * x - b).lpNorm<Eigen::Infinity>();
  const double nb = b.lpNorm<Eigen::Infinity>();
  return nb > 0.0 ? r / nb : r;
}

}  // namespace nystrom
