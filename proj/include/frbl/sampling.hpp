#pragma once

#include "frbl/datum.hpp"
#include "frbl/gaussian.hpp"
#include "frbl/linalg.hpp"

#include <random>

namespace frbl {

using Rng = std::mt19937_64;

inline constexpr unsigned long long kDefaultSeed = 20240607ULL;

// Q diag(e) Q^T with Q Haar-orthogonal and e uniform in [lo, hi].
SymMatrix random_pd(Index n, Rng& rng, double lo = 0.25, double hi = 4.0);

// Reproducible symmetric matrix with standard normal entries.
SymMatrix random_symmetric(Index n, Rng& rng);

struct TupleSampling {
  double eig_lo = 0.25;
  double eig_hi = 4.0;
  // Probability that the g forms are scaled exactly to the boundary of
  // admissibility, so that the form gap has a zero eigenvalue.
  double tight_probability = 0.25;
  double tightness_lo = 0.3;  // otherwise the g forms are scaled by u in [tightness_lo, 1]
  double prefactor_sigma = 1.0;
};

// Random Gaussian tuple satisfying the pointwise relation for `datum`.
// Random f forms; random g directions rescaled to the admissible region;
// prefactors shifted so that sum d_j m_j >= sum c_i l_i.
GaussianTuple sample_admissible_tuple(const FrblDatum& datum, Rng& rng, const TupleSampling& options = {});

}  // namespace frbl
