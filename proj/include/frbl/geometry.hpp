#pragma once

#include "frbl/datum.hpp"
#include "frbl/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frbl {

inline constexpr double kDefaultFeasibilityTol = 1e-8;
inline constexpr int kDefaultMaxIter = 50000;

enum class Verdict { geometric, not_geometric_loewner, sigma_not_found };

std::string_view to_string(Verdict v);

struct LoewnerCheck {
  bool ok = false;
  double min_eig = 0.0;  // min eigenvalue of Lambda_c - Q^T Lambda_d Q
};

LoewnerCheck check_loewner(const FrblDatum& datum, double tol = kDefaultLoewnerTol);

struct SigmaSearchOptions {
  double tol = kDefaultFeasibilityTol;
  int max_iter = kDefaultMaxIter;
  // Record the distance of every PSD iterate to the affine constraint set.
  bool record_trace = false;
};

struct SigmaSearch {
  bool found = false;
  std::optional<SymMatrix> sigma;
  double sigma_min_eig = 0.0;
  double residual_in = 0.0;   // max_i |Sigma_ii - id|_F
  double residual_out = 0.0;  // max_j |(Q Sigma Q^T)_jj - id|_F
  int iterations = 0;
  std::string reason;  // "converged", "affine-infeasible" or "max-iter"
  std::vector<double> affine_distance_trace;
};

// Dykstra alternating projections between the PSD cone over E_0 and the
// affine set {Sigma : Sigma_ii = id, (Q Sigma Q^T)_jj = id}, started at the
// block-diagonal identity. Running out of iterations is not a proof that no
// Sigma exists.
SigmaSearch find_sigma(const FrblDatum& datum, const SigmaSearchOptions& options = {});

struct CertifyOptions {
  double loewner_tol = kDefaultLoewnerTol;
  double feasibility_tol = kDefaultFeasibilityTol;
  int max_iter = kDefaultMaxIter;
};

struct GeometricCertificate {
  bool loewner_ok = false;
  double loewner_min_eig = 0.0;
  std::optional<SymMatrix> sigma;
  double sigma_min_eig = 0.0;
  double residual_in = 0.0;
  double residual_out = 0.0;
  int iterations = 0;
  Verdict verdict = Verdict::sigma_not_found;
  std::string reason;
  CertifyOptions options;

  bool is_geometric() const noexcept { return verdict == Verdict::geometric; }
};

GeometricCertificate check_geometric(const FrblDatum& datum, const CertifyOptions& options = {});

// Residuals of the two diagonal-block constraint families for a given Sigma.
std::pair<double, double> sigma_residuals(const FrblDatum& datum, const SymMatrix& sigma);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// sum_i (1/c_i) |sum_j d_j Q_ji^T v^j|^2 <= sum_j d_j |v^j|^2, evaluated for
// one family of vectors v^j in E^j. Meaningful for geometric data.
InequalityCheck verify_key1(const FrblDatum& datum, std::span<const Vector> v_blocks);

enum class TraceVerdict { hypothesis_not_met, conclusion_holds, conclusion_fails };

std::string_view to_string(TraceVerdict v);

struct TraceImplication {
  TraceVerdict verdict = TraceVerdict::hypothesis_not_met;
  double hypothesis_min_eig = 0.0;  // min eig of Q^T(sum d_j Y_j)Q - sum c_i X_i
  double lhs = 0.0;                 // sum_i c_i Tr X_i
  double rhs = 0.0;                 // sum_j d_j Tr Y_j
  double sigma_lhs = 0.0;           // Tr(Sigma * blockdiag(c_i X_i))
  double sigma_rhs = 0.0;           // Tr(Q Sigma Q^T * blockdiag(d_j Y_j))
};

// If sum c_i X_i <= Q^T (sum d_j Y_j) Q holds within tol, checks
// sum c_i Tr X_i <= sum d_j Tr Y_j. sigma is the certificate of geometricity.
TraceImplication verify_trace_implication(const FrblDatum& datum, std::span<const SymMatrix> x_blocks,
                                          std::span<const SymMatrix> y_blocks, const SymMatrix& sigma,
                                          double tol = kDefaultLoewnerTol);

}  // namespace frbl
