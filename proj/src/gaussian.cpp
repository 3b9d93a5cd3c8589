#include "frbl/gaussian.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace frbl {

namespace {

SymMatrix checked_form(SymMatrix form) {
  const double min_eig = min_eigenvalue(form);
  if (!(min_eig > kMinFormEigenvalue)) {
    throw NotPositiveDefinite("Gaussian form has eigenvalue " + std::to_string(min_eig) +
                              ", needs to be positive definite");
  }
  return form;
}

void require_pd_weight(const SymMatrix& weight, Index dim) {
  if (weight.dim() != dim) throw InvalidInput("heat weight dimension does not match the Gaussian");
  if (!(min_eigenvalue(weight) > 0)) throw NotPositiveDefinite("heat weight is not positive definite");
}

}  // namespace

CenteredGaussian::CenteredGaussian(double log_prefactor, SymMatrix form)
    : log_prefactor_(log_prefactor), form_(checked_form(std::move(form))) {
  if (!std::isfinite(log_prefactor_)) throw InvalidInput("Gaussian log-prefactor is not finite");
}

CenteredGaussian CenteredGaussian::standard(int n) { return {0.0, SymMatrix::identity(n)}; }

double CenteredGaussian::log_value(const Vector& x) const {
  if (x.size() != dim()) throw InvalidInput("evaluation point has the wrong dimension");
  return log_prefactor_ - x.dot(form_.matrix() * x);
}

double CenteredGaussian::value(const Vector& x) const { return std::exp(log_value(x)); }

CenteredGaussian CenteredGaussian::scaled(double log_factor) const {
  return {log_prefactor_ + log_factor, form_};
}

double log_gaussian_integral(const CenteredGaussian& g) {
  return g.log_prefactor() + 0.5 * g.dim() * std::log(std::numbers::pi) - 0.5 * log_det_pd(g.form());
}

double gaussian_integral(const CenteredGaussian& g) { return std::exp(log_gaussian_integral(g)); }

CenteredGaussian heat_evolve(const CenteredGaussian& g, double t, const SymMatrix& weight) {
  if (!(t > 0) || !std::isfinite(t)) throw InvalidInput("heat evolution needs t > 0");
  require_pd_weight(weight, g.dim());
  // M = B^{-1} + 4 t A; new form M^{-1}; det(id + 4tAB) = det(B) det(M).
  const SymMatrix m = inverse_pd(g.form()) + (4.0 * t) * weight;
  const double log_det = log_det_pd(g.form()) + log_det_pd(m);
  return {g.log_prefactor() - 0.5 * log_det, inverse_pd(m)};
}

CenteredGaussian heat_evolve(const CenteredGaussian& g, double t) {
  return heat_evolve(g, t, SymMatrix::identity(g.dim()));
}

void require_matches(const FrblDatum& datum, const GaussianTuple& tuple) {
  const auto& layout = datum.layout();
  if (static_cast<int>(tuple.f.size()) != layout.k() || static_cast<int>(tuple.g.size()) != layout.m()) {
    throw InvalidInput("tuple has " + std::to_string(tuple.f.size()) + " f and " +
                       std::to_string(tuple.g.size()) + " g functions, datum needs " +
                       std::to_string(layout.k()) + " and " + std::to_string(layout.m()));
  }
  for (int i = 0; i < layout.k(); ++i) {
    if (tuple.f[i].dim() != layout.in_dim(i)) {
      throw InvalidInput("f[" + std::to_string(i) + "] lives on the wrong space");
    }
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (tuple.g[j].dim() != layout.out_dim(j)) {
      throw InvalidInput("g[" + std::to_string(j) + "] lives on the wrong space");
    }
  }
}

GaussianTuple standard_tuple(const FrblDatum& datum) {
  GaussianTuple out;
  for (int n : datum.layout().in_dims()) out.f.push_back(CenteredGaussian::standard(n));
  for (int n : datum.layout().out_dims()) out.g.push_back(CenteredGaussian::standard(n));
  return out;
}

GaussianTuple evolve_tuple(const GaussianTuple& tuple, double t) {
  GaussianTuple out;
  for (const auto& f : tuple.f) out.f.push_back(heat_evolve(f, t));
  for (const auto& g : tuple.g) out.g.push_back(heat_evolve(g, t));
  return out;
}

GaussianTuple evolve_tuple(const GaussianTuple& tuple, double t, std::span<const SymMatrix> weights_in,
                           std::span<const SymMatrix> weights_out) {
  if (weights_in.size() != tuple.f.size() || weights_out.size() != tuple.g.size()) {
    throw InvalidInput("one heat weight per component is required");
  }
  GaussianTuple out;
  for (std::size_t i = 0; i < tuple.f.size(); ++i) out.f.push_back(heat_evolve(tuple.f[i], t, weights_in[i]));
  for (std::size_t j = 0; j < tuple.g.size(); ++j) out.g.push_back(heat_evolve(tuple.g[j], t, weights_out[j]));
  return out;
}

RelationCheck relation_check(const FrblDatum& datum, const GaussianTuple& tuple, double tol) {
  require_matches(datum, tuple);
  std::vector<SymMatrix> in_forms;
  std::vector<SymMatrix> out_forms;
  double a = 0.0;
  double b = 0.0;
  for (int i = 0; i < datum.k(); ++i) {
    in_forms.push_back(datum.c()[i] * tuple.f[i].form());
    a += datum.c()[i] * tuple.f[i].log_prefactor();
  }
  for (int j = 0; j < datum.m(); ++j) {
    out_forms.push_back(datum.d()[j] * tuple.g[j].form());
    b += datum.d()[j] * tuple.g[j].log_prefactor();
  }
  const SymMatrix p = block_diagonal(in_forms);
  const SymMatrix s = sandwich(datum.q(), block_diagonal(out_forms));
  RelationCheck out;
  out.form_gap_min_eig = min_eigenvalue(p - s);
  out.prefactor_gap = b - a;
  out.holds = out.form_gap_min_eig >= -tol && out.prefactor_gap >= -tol;
  return out;
}

double log_frbl_ratio(const FrblDatum& datum, const GaussianTuple& tuple) {
  require_matches(datum, tuple);
  double out = 0.0;
  for (int i = 0; i < datum.k(); ++i) out += datum.c()[i] * log_gaussian_integral(tuple.f[i]);
  for (int j = 0; j < datum.m(); ++j) out -= datum.d()[j] * log_gaussian_integral(tuple.g[j]);
  return out;
}

double frbl_ratio(const FrblDatum& datum, const GaussianTuple& tuple) {
  return std::exp(log_frbl_ratio(datum, tuple));
}

double log_det_constant(const FrblDatum& datum, std::span<const SymMatrix> weights_in,
                        std::span<const SymMatrix> weights_out) {
  const auto& layout = datum.layout();
  if (static_cast<int>(weights_in.size()) != layout.k() || static_cast<int>(weights_out.size()) != layout.m()) {
    throw InvalidInput("one heat weight per space is required");
  }
  double out = 0.0;
  for (int i = 0; i < layout.k(); ++i) {
    if (weights_in[i].dim() != layout.in_dim(i)) throw InvalidInput("weight on E_i has the wrong size");
    out += 0.5 * datum.c()[i] * log_det_pd(weights_in[i]);
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (weights_out[j].dim() != layout.out_dim(j)) throw InvalidInput("weight on E^j has the wrong size");
    out -= 0.5 * datum.d()[j] * log_det_pd(weights_out[j]);
  }
  return out;
}

std::pair<std::vector<SymMatrix>, std::vector<SymMatrix>> heat_weights_of(const GaussianTuple& tuple) {
  std::vector<SymMatrix> in;
  std::vector<SymMatrix> out;
  for (const auto& f : tuple.f) in.push_back(inverse_pd(f.form()));
  for (const auto& g : tuple.g) out.push_back(inverse_pd(g.form()));
  return {std::move(in), std::move(out)};
}

Geometrization geometrize_from_extremizers(const FrblDatum& datum, std::span<const SymMatrix> weights_in,
                                           std::span<const SymMatrix> weights_out,
                                           const CertifyOptions& options) {
  const auto& layout = datum.layout();
  if (static_cast<int>(weights_in.size()) != layout.k() || static_cast<int>(weights_out.size()) != layout.m()) {
    throw InvalidInput("one heat weight per space is required");
  }
  std::vector<Matrix> c_blocks;
  std::vector<Matrix> d_blocks;
  for (const auto& a : weights_in) c_blocks.push_back(inv_sqrt_pd(a).matrix());
  for (const auto& a : weights_out) {
    if (!(min_eigenvalue(a) > 0)) throw NotPositiveDefinite("output heat weight is not positive definite");
    d_blocks.push_back(sqrt_psd(a).matrix());
  }
  EquivalenceTransform transform(std::move(c_blocks), std::move(d_blocks));
  FrblDatum transformed = apply_equivalence(datum, transform);
  GeometricCertificate cert = check_geometric(transformed, options);
  return {std::move(transform), std::move(transformed), std::move(cert)};
}

std::string_view to_string(ExtremizerVerdict v) {
  switch (v) {
    case ExtremizerVerdict::extremizer: return "extremizer";
    case ExtremizerVerdict::not_extremizer: return "not-extremizer";
    case ExtremizerVerdict::undetermined: return "undetermined";
  }
  return "unknown";
}

ExtremizerReport extremizer_check(const FrblDatum& datum, const GaussianTuple& tuple,
                                  const ExtremizerOptions& options) {
  const auto relation = relation_check(datum, tuple, options.tol);
  if (!relation.holds) {
    throw PreconditionViolated("tuple does not satisfy the pointwise relation (form gap " +
                               std::to_string(relation.form_gap_min_eig) + ", prefactor gap " +
                               std::to_string(relation.prefactor_gap) + ")");
  }
  ExtremizerReport out;
  out.log_ratio = log_frbl_ratio(datum, tuple);
  const auto [weights_in, weights_out] = heat_weights_of(tuple);
  out.log_det_formula = log_det_constant(datum, weights_in, weights_out);

  const auto decide = [&](double log_reference, std::string source) {
    out.log_reference = log_reference;
    out.reference_source = std::move(source);
    out.verdict = std::abs(out.log_ratio - log_reference) <= options.tol ? ExtremizerVerdict::extremizer
                                                                         : ExtremizerVerdict::not_extremizer;
    return out;
  };

  if (check_geometric(datum, options.certify).is_geometric()) return decide(0.0, "geometric");

  // Equivalent to a geometric datum through the tuple's own heat weights: the
  // constant is then the determinant formula.
  const auto geo = geometrize_from_extremizers(datum, weights_in, weights_out, options.certify);
  if (geo.certificate.is_geometric()) return decide(out.log_det_formula, "equivalent-geometric");

  if (!options.comparison.empty()) {
    double best = out.log_ratio;
    for (const auto& other : options.comparison) {
      if (relation_check(datum, other, options.tol).holds) best = std::max(best, log_frbl_ratio(datum, other));
    }
    return decide(best, "comparison-family");
  }

  out.log_reference = std::numeric_limits<double>::quiet_NaN();
  out.reference_source = "none";
  out.verdict = ExtremizerVerdict::undetermined;
  return out;
}

double long_time_limit(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x) {
  require_pd_weight(weight, g.dim());
  if (x.size() != g.dim()) throw InvalidInput("evaluation point has the wrong dimension");
  const double log_val = -0.5 * log_det_pd(weight) - x.dot(inverse_pd(weight).matrix() * x) +
                         log_gaussian_integral(g);
  return std::exp(log_val);
}

double log_rescaled_heat_value(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x, double t) {
  if (x.size() != g.dim()) throw InvalidInput("evaluation point has the wrong dimension");
  const CenteredGaussian evolved = heat_evolve(g, t, weight);
  return 0.5 * g.dim() * std::log(4.0 * std::numbers::pi * t) + evolved.log_value((2.0 * std::sqrt(t)) * x);
}

double rescaled_heat_value(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x, double t) {
  return std::exp(log_rescaled_heat_value(g, weight, x, t));
}

}  // namespace frbl
