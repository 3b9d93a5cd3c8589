#pragma once

#include <Eigen/Dense>

#include <span>

namespace frbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultLoewnerTol = 1e-9;
inline constexpr double kDefaultSqrtTol = 1e-10;

// Dense real symmetric matrix. Construction mirrors the upper triangle into
// the lower one, so products such as Q * Sigma * Q^T that pick up rounding
// asymmetry can be passed in directly. Entries must be finite.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& entries);

  static SymMatrix identity(Index n);
  static SymMatrix zero(Index n);
  static SymMatrix diagonal(const Vector& diag);
  static SymMatrix scalar(double value) { return diagonal(Vector::Constant(1, value)); }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

EigenDecomposition sym_eig(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

// a >= b in the Loewner order: min eig(a - b) >= -tol.
bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tol = kDefaultLoewnerTol);

// Frobenius-nearest PSD matrix (negative eigenvalues clipped to zero).
SymMatrix psd_project(const SymMatrix& m);

// Principal square root. Eigenvalues in [-tol * max(1, |m|_2), 0) are treated
// as zero; anything more negative throws NotPositiveSemidefinite.
SymMatrix sqrt_psd(const SymMatrix& m, double tol = kDefaultSqrtTol);

// m^{-1/2} for positive definite m.
SymMatrix inv_sqrt_pd(const SymMatrix& m);
SymMatrix inverse_pd(const SymMatrix& m);
double log_det_pd(const SymMatrix& m);

// outer^T * inner * outer.
SymMatrix sandwich(const Matrix& outer, const SymMatrix& inner);

SymMatrix block_diagonal(std::span<const SymMatrix> blocks);

}  // namespace frbl
