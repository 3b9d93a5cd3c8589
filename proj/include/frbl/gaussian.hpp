#pragma once

#include "frbl/datum.hpp"
#include "frbl/geometry.hpp"
#include "frbl/linalg.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frbl {

inline constexpr double kMinFormEigenvalue = 1e-12;

// x -> exp(log_prefactor - <A x, x>) with A positive definite.
class CenteredGaussian {
 public:
  CenteredGaussian(double log_prefactor, SymMatrix form);

  // exp(-|x|^2) on R^n.
  static CenteredGaussian standard(int n);

  int dim() const noexcept { return static_cast<int>(form_.dim()); }
  double log_prefactor() const noexcept { return log_prefactor_; }
  const SymMatrix& form() const noexcept { return form_; }

  double log_value(const Vector& x) const;
  double value(const Vector& x) const;

  // Same form, prefactor multiplied by exp(log_factor).
  CenteredGaussian scaled(double log_factor) const;

 private:
  double log_prefactor_;
  SymMatrix form_;
};

double log_gaussian_integral(const CenteredGaussian& g);
double gaussian_integral(const CenteredGaussian& g);

// Closed-form e^{t Delta_{V,A}} acting on a centred Gaussian: the form becomes
// (B^{-1} + 4 t A)^{-1} and the log-prefactor drops by
// (1/2) log det(id + 4 t A B).
CenteredGaussian heat_evolve(const CenteredGaussian& g, double t, const SymMatrix& weight);
CenteredGaussian heat_evolve(const CenteredGaussian& g, double t);

struct GaussianTuple {
  std::vector<CenteredGaussian> f;  // one per input space E_i
  std::vector<CenteredGaussian> g;  // one per output space E^j
};

void require_matches(const FrblDatum& datum, const GaussianTuple& tuple);

// f_i = exp(-|x|^2), g_j = exp(-|y|^2).
GaussianTuple standard_tuple(const FrblDatum& datum);

// Every component evolved by its own standard heat semigroup.
GaussianTuple evolve_tuple(const GaussianTuple& tuple, double t);
GaussianTuple evolve_tuple(const GaussianTuple& tuple, double t, std::span<const SymMatrix> weights_in,
                           std::span<const SymMatrix> weights_out);

struct RelationCheck {
  bool holds = false;
  double form_gap_min_eig = 0.0;  // min eig of sum c_i A_i - Q^T (sum d_j A^j) Q
  double prefactor_gap = 0.0;     // sum d_j m_j - sum c_i l_i
};

// prod f_i^{c_i}(pi_i x) <= prod g_j^{d_j}(pi_j Q x) for every x, decided
// exactly through the form and prefactor gaps.
RelationCheck relation_check(const FrblDatum& datum, const GaussianTuple& tuple,
                             double tol = kDefaultLoewnerTol);

// log of prod (int f_i)^{c_i} / prod (int g_j)^{d_j}.
double log_frbl_ratio(const FrblDatum& datum, const GaussianTuple& tuple);
double frbl_ratio(const FrblDatum& datum, const GaussianTuple& tuple);

// log of prod det(A_i)^{c_i/2} / prod det(A^j)^{d_j/2} for heat weights A_i on
// E_i and A^j on E^j.
double log_det_constant(const FrblDatum& datum, std::span<const SymMatrix> weights_in,
                        std::span<const SymMatrix> weights_out);

// Heat weights matching a Gaussian tuple: A = form^{-1}, so that each
// component reads exp(l - <A^{-1} x, x>).
std::pair<std::vector<SymMatrix>, std::vector<SymMatrix>> heat_weights_of(const GaussianTuple& tuple);

struct Geometrization {
  EquivalenceTransform transform;
  FrblDatum datum;
  GeometricCertificate certificate;
};

// C_i = A_i^{-1/2}, D_j = (A^j)^{1/2}, then re-certify. No claim that the
// result is geometric; the certificate is the verdict.
Geometrization geometrize_from_extremizers(const FrblDatum& datum, std::span<const SymMatrix> weights_in,
                                           std::span<const SymMatrix> weights_out,
                                           const CertifyOptions& options = {});

enum class ExtremizerVerdict { extremizer, not_extremizer, undetermined };

std::string_view to_string(ExtremizerVerdict v);

struct ExtremizerReport {
  ExtremizerVerdict verdict = ExtremizerVerdict::undetermined;
  double log_ratio = 0.0;
  double log_reference = 0.0;  // log of the constant the ratio is compared to
  double log_det_formula = 0.0;
  // "geometric", "equivalent-geometric", "comparison-family" or "none".
  std::string reference_source;
};

struct ExtremizerOptions {
  double tol = 1e-9;
  CertifyOptions certify;
  // Alternative admissible tuples; only consulted when neither the datum nor
  // its geometrization from this tuple certifies geometric.
  std::span<const GaussianTuple> comparison;
};

// Throws PreconditionViolated if the tuple does not satisfy the relation.
ExtremizerReport extremizer_check(const FrblDatum& datum, const GaussianTuple& tuple,
                                  const ExtremizerOptions& options = {});

// det(A)^{-1/2} exp(-<A^{-1} x, x>) * int g.
double long_time_limit(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x);

// (4 pi t)^{n/2} (e^{t Delta_{V,A}} g)(2 sqrt(t) x), evaluated in log space.
double log_rescaled_heat_value(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x, double t);
double rescaled_heat_value(const CenteredGaussian& g, const SymMatrix& weight, const Vector& x, double t);

}  // namespace frbl
