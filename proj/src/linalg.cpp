#include "frbl/linalg.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace frbl {

SymMatrix::SymMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols()) {
    throw InvalidInput("symmetric matrix must be square, got " + std::to_string(entries.rows()) +
                       "x" + std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) throw InvalidInput("symmetric matrix has non-finite entries");
  m_ = entries.triangularView<Eigen::Upper>();
  m_.triangularView<Eigen::StrictlyLower>() = m_.transpose().triangularView<Eigen::StrictlyLower>();
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("dimension mismatch in symmetric sum");
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("dimension mismatch in symmetric difference");
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

EigenDecomposition sym_eig(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw InvalidInput("symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(m.dim() - 1);
}

bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    throw InvalidInput("loewner comparison of " + std::to_string(a.dim()) + " and " +
                       std::to_string(b.dim()) + " dimensional matrices");
  }
  if (tol < 0) throw InvalidInput("loewner tolerance must be non-negative");
  return min_eigenvalue(a - b) >= -tol;
}

namespace {

template <typename F>
SymMatrix spectral_map(const EigenDecomposition& eig, F&& f) {
  Vector mapped = eig.values.unaryExpr(std::forward<F>(f));
  return SymMatrix(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

}  // namespace

SymMatrix psd_project(const SymMatrix& m) {
  return spectral_map(sym_eig(m), [](double v) { return std::max(v, 0.0); });
}

SymMatrix sqrt_psd(const SymMatrix& m, double tol) {
  const auto eig = sym_eig(m);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  if (eig.values(0) < -tol * scale) {
    throw NotPositiveSemidefinite("square root of a matrix with eigenvalue " +
                                  std::to_string(eig.values(0)));
  }
  return spectral_map(eig, [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

SymMatrix inv_sqrt_pd(const SymMatrix& m) {
  const auto eig = sym_eig(m);
  if (!(eig.values(0) > 0)) {
    throw NotPositiveDefinite("inverse square root of a matrix with eigenvalue " +
                              std::to_string(eig.values(0)));
  }
  return spectral_map(eig, [](double v) { return 1.0 / std::sqrt(v); });
}

SymMatrix inverse_pd(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("matrix is not positive definite");
  return SymMatrix(llt.solve(Matrix::Identity(m.dim(), m.dim())));
}

double log_det_pd(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

SymMatrix sandwich(const Matrix& outer, const SymMatrix& inner) {
  if (outer.rows() != inner.dim()) throw InvalidInput("dimension mismatch in congruence");
  return SymMatrix(outer.transpose() * inner.matrix() * outer);
}

SymMatrix block_diagonal(std::span<const SymMatrix> blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.dim();
  Matrix out = Matrix::Zero(n, n);
  Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.dim(), b.dim()) = b.matrix();
    offset += b.dim();
  }
  return SymMatrix(out);
}

}  // namespace frbl
