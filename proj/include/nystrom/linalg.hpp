#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

namespace nystrom {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// LU factorization with partial pivoting. Solves are const and may run
/// concurrently against one factorization.
class LuFactorization {
 public:
  LuFactorization() = default;
  /// Throws SingularMatrix when a pivot vanishes or the matrix is not finite.
  explicit LuFactorization(const DenseMatrix& a);

  Eigen::Index size() const { return lu_.rows(); }
  Vector solve(const Vector& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  Eigen::PartialPivLU<DenseMatrix> lu_;
};

LuFactorization lu_factor(const DenseMatrix& a);
Vector lu_solve(const LuFactorization& f, const Vector& b);

/// ||A x - b||_inf / ||b||_inf, or ||A x||_inf when b = 0.
double relative_residual(const DenseMatrix& a, const Vector& x, const Vector& b);

}  // namespace nystrom
