#pragma once

// Test-only generators and independent oracles. Nothing here calls into the
// code under test except for value types.

#include "frbl/datum.hpp"
#include "frbl/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace frbl::test {

using Gen = std::mt19937_64;

inline Matrix normal_matrix(Gen& gen, Index rows, Index cols) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = n(gen);
  }
  return m;
}

inline Vector normal_vector(Gen& gen, Index n) { return normal_matrix(gen, n, 1).col(0); }

inline SymMatrix gen_symmetric(Gen& gen, Index n) {
  const Matrix g = normal_matrix(gen, n, n);
  return SymMatrix(0.5 * (g + g.transpose()));
}

// G^T G, rank-deficient when rank < n.
inline SymMatrix gen_psd(Gen& gen, Index n, Index rank) {
  const Matrix g = normal_matrix(gen, rank, n);
  return SymMatrix(g.transpose() * g);
}

// Eigenvalues in [lo, hi] with a random orthogonal frame built by
// Gram-Schmidt on a Gaussian matrix.
inline SymMatrix gen_pd(Gen& gen, Index n, double lo = 0.25, double hi = 4.0) {
  Matrix g = normal_matrix(gen, n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) g.col(j) -= g.col(i).dot(g.col(j)) * g.col(i);
    g.col(j).normalize();
  }
  std::uniform_real_distribution<double> u(lo, hi);
  Vector e(n);
  for (Index i = 0; i < n; ++i) e(i) = u(gen);
  return SymMatrix(g * e.asDiagonal() * g.transpose());
}

inline double uniform(Gen& gen, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

// Closed-form eigenvalues of [[a, b], [b, c]], ascending.
inline std::pair<double, double> eig2(double a, double b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid - rad, mid + rad};
}

// Brute-force quadrature of (e^{t Delta_A} g)(x) for g(y) = exp(l - <B y, y>),
// as int g(z) p_t(x - z) dz with p_t the explicit kernel. The box is centred
// on the narrower of the two factors and resolved at a fifth of the smallest
// standard deviation present. Dimensions 1 and 2.
inline double heat_quadrature(double l, const Matrix& b, double t, const Matrix& a, const Vector& x) {
  const Index n = b.rows();
  const Matrix a_inv = a.inverse();
  const double norm = std::pow(4.0 * std::numbers::pi * t, -0.5 * static_cast<double>(n)) / std::sqrt(a.determinant());

  // Standard deviations per eigen-direction: g ~ 1/sqrt(2 eig(B)), p ~ sqrt(2 t eig(A)).
  Eigen::SelfAdjointEigenSolver<Matrix> eb(b), ea(a);
  const double g_wide = 1.0 / std::sqrt(2.0 * eb.eigenvalues().minCoeff());
  const double g_thin = 1.0 / std::sqrt(2.0 * eb.eigenvalues().maxCoeff());
  const double p_wide = std::sqrt(2.0 * t * ea.eigenvalues().maxCoeff());
  const double p_thin = std::sqrt(2.0 * t * ea.eigenvalues().minCoeff());
  const bool centre_on_g = g_wide <= p_wide;
  const Vector centre = centre_on_g ? Vector::Zero(n) : x;
  const double reach = 11.0 * (centre_on_g ? g_wide : p_wide);
  const double h = std::min(g_thin, p_thin) / 5.0;
  const int steps = static_cast<int>(std::ceil(reach / h));

  auto integrand = [&](const Vector& z) {
    const Vector r = x - z;
    return std::exp(l - z.dot(b * z) - r.dot(a_inv * r) / (4.0 * t)) * norm;
  };

  double sum = 0.0;
  Vector z(n);
  if (n == 1) {
    for (int i = -steps; i <= steps; ++i) {
      z(0) = centre(0) + i * h;
      sum += integrand(z);
    }
    return sum * h;
  }
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      z(0) = centre(0) + i * h;
      z(1) = centre(1) + j * h;
      sum += integrand(z);
    }
  }
  return sum * h * h;
}

// Smallest admissible g-form for PL(lambda) with f forms (a1, a2): the
// relation needs lambda a1 x^2 + (1 - lambda) a2 y^2 >= gamma (lambda x + (1 - lambda) y)^2
// in every direction (x, y) = (cos th, sin th). Scanned over angles.
inline double pl_min_g_form(double lambda, double a1, double a2, int samples = 200000) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double th = std::numbers::pi * s / samples;
    const double x = std::cos(th);
    const double y = std::sin(th);
    const double q = lambda * x + (1.0 - lambda) * y;
    if (std::abs(q) < 1e-9) continue;
    best = std::min(best, (lambda * a1 * x * x + (1.0 - lambda) * a2 * y * y) / (q * q));
  }
  return best;
}

// int_{-1}^{1} exp(-1 / (1 - s^2)) ds by composite Simpson.
inline double bump_integral(int intervals = 200000) {
  auto f = [](double s) {
    const double r = 1.0 - s * s;
    return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
  };
  const double h = 2.0 / intervals;
  double sum = f(-1.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(-1.0 + i * h);
  return sum * h / 3.0;
}

// Random tight frame datum: k = 1, c = (1), E_1 = R^n, rows u_j / |u_j| of a
// matrix with orthonormal columns, d_j = |u_j|^2.
inline DatumCandidate tight_frame_candidate(Gen& gen, int n, int m) {
  Matrix v = normal_matrix(gen, m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
    v.col(j).normalize();
  }
  DatumCandidate raw{{n}, std::vector<int>(m, 1), {1.0}, std::vector<double>(m), Matrix(m, n)};
  for (Index j = 0; j < m; ++j) {
    const double len2 = v.row(j).squaredNorm();
    raw.d[j] = len2;
    raw.q.row(j) = v.row(j) / std::sqrt(len2);
  }
  return raw;
}

}  // namespace frbl::test
