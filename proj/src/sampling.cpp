#include "frbl/sampling.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>

namespace frbl {

SymMatrix random_pd(Index n, Rng& rng, double lo, double hi) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(lo, hi);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector e(n);
  for (Index i = 0; i < n; ++i) e(i) = uniform(rng);
  return SymMatrix(q * e.asDiagonal() * q.transpose());
}

SymMatrix random_symmetric(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  return SymMatrix(g);
}

GaussianTuple sample_admissible_tuple(const FrblDatum& datum, Rng& rng, const TupleSampling& options) {
  const auto& layout = datum.layout();
  std::normal_distribution<double> normal(0.0, options.prefactor_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SymMatrix> f_forms;
  std::vector<SymMatrix> g_forms;
  std::vector<SymMatrix> weighted_f;
  std::vector<SymMatrix> weighted_g;
  for (int i = 0; i < layout.k(); ++i) {
    f_forms.push_back(random_pd(layout.in_dim(i), rng, options.eig_lo, options.eig_hi));
    weighted_f.push_back(datum.c()[i] * f_forms.back());
  }
  for (int j = 0; j < layout.m(); ++j) {
    g_forms.push_back(random_pd(layout.out_dim(j), rng, options.eig_lo, options.eig_hi));
    weighted_g.push_back(datum.d()[j] * g_forms.back());
  }

  // Largest alpha with P - alpha S >= 0 is 1 / lambda_max(P^{-1/2} S P^{-1/2}).
  const SymMatrix p = block_diagonal(weighted_f);
  const SymMatrix s = sandwich(datum.q(), block_diagonal(weighted_g));
  const SymMatrix p_inv_sqrt = inv_sqrt_pd(p);
  const double lam = max_eigenvalue(sandwich(p_inv_sqrt.matrix(), s));
  const double alpha_max = lam > 0 ? 1.0 / lam : 1.0;
  const double u = unit(rng) < options.tight_probability
                       ? 1.0
                       : options.tightness_lo + (1.0 - options.tightness_lo) * unit(rng);
  const double alpha = alpha_max * u;

  GaussianTuple out;
  double a = 0.0;
  for (int i = 0; i < layout.k(); ++i) {
    const double l = normal(rng);
    a += datum.c()[i] * l;
    out.f.emplace_back(l, f_forms[i]);
  }
  std::vector<double> m_pref(layout.m());
  double b = 0.0;
  double d_sum = 0.0;
  for (int j = 0; j < layout.m(); ++j) {
    m_pref[j] = normal(rng);
    b += datum.d()[j] * m_pref[j];
    d_sum += datum.d()[j];
  }
  // Shift every g prefactor by the same amount; sometimes leave zero slack.
  const double slack = unit(rng) < options.tight_probability ? 0.0 : std::abs(normal(rng));
  const double shift = (a - b + slack) / d_sum;
  for (int j = 0; j < layout.m(); ++j) out.g.emplace_back(m_pref[j] + shift, alpha * g_forms[j]);
  return out;
}

}  // namespace frbl
