#pragma once

#include "frbl/linalg.hpp"

#include <string>
#include <vector>

namespace frbl {

inline constexpr double kScalingTol = 1e-12;
inline constexpr double kSingularDetTol = 1e-12;

// Dimensions of the input spaces E_1..E_k and output spaces E^1..E^m, with
// offsets locating each one inside the stacked vectors of E_0 and E^0.
// Indices are zero-based.
class SpaceLayout {
 public:
  SpaceLayout(std::vector<int> in_dims, std::vector<int> out_dims);

  int k() const noexcept { return static_cast<int>(in_dims_.size()); }
  int m() const noexcept { return static_cast<int>(out_dims_.size()); }
  const std::vector<int>& in_dims() const noexcept { return in_dims_; }
  const std::vector<int>& out_dims() const noexcept { return out_dims_; }
  int in_dim(int i) const { return in_dims_.at(i); }
  int out_dim(int j) const { return out_dims_.at(j); }
  int in_offset(int i) const { return in_offsets_.at(i); }
  int out_offset(int j) const { return out_offsets_.at(j); }
  int total_in() const noexcept { return in_offsets_.back(); }
  int total_out() const noexcept { return out_offsets_.back(); }

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  std::vector<int> in_dims_;
  std::vector<int> out_dims_;
  std::vector<int> in_offsets_;   // size k + 1
  std::vector<int> out_offsets_;  // size m + 1
};

// Unvalidated fields as read from JSON or built by hand.
struct DatumCandidate {
  std::vector<int> in_dims;
  std::vector<int> out_dims;
  std::vector<double> c;
  std::vector<double> d;
  Matrix q;
};

// A validated Forward-Reverse Brascamp-Lieb datum (c, d, Q). Only
// validate_datum() creates one, so every instance satisfies the positivity
// and scaling conditions.
class FrblDatum {
 public:
  const SpaceLayout& layout() const noexcept { return layout_; }
  const std::vector<double>& c() const noexcept { return c_; }
  const std::vector<double>& d() const noexcept { return d_; }
  const Matrix& q() const noexcept { return q_; }
  int k() const noexcept { return layout_.k(); }
  int m() const noexcept { return layout_.m(); }

  // Q_{ji}: the linear map E_i -> E^j.
  Matrix block(int j, int i) const;
  // Q_j = pi_{E^j} Q: the map E_0 -> E^j.
  Matrix row_block(int j) const;

  DatumCandidate to_candidate() const;

 private:
  friend FrblDatum validate_datum(const DatumCandidate& raw);
  FrblDatum(SpaceLayout layout, std::vector<double> c, std::vector<double> d, Matrix q);

  SpaceLayout layout_;
  std::vector<double> c_;
  std::vector<double> d_;
  Matrix q_;
};

// Every violated condition, in a stable order; empty iff the candidate is valid.
std::vector<std::string> datum_violations(const DatumCandidate& raw);

// Throws InvalidDatum listing all violations.
FrblDatum validate_datum(const DatumCandidate& raw);

struct LambdaMaps {
  SymMatrix lambda_c;  // block-diagonal c_i * id over E_0
  SymMatrix lambda_d;  // block-diagonal d_j * id over E^0
};

LambdaMaps lambda_maps(const FrblDatum& datum);

// Block-diagonal invertible maps C_i on E_i and D_j on E^j. Stored as blocks
// only; a full E_0 matrix is never accepted.
class EquivalenceTransform {
 public:
  EquivalenceTransform(std::vector<Matrix> c_blocks, std::vector<Matrix> d_blocks);

  static EquivalenceTransform identity(const SpaceLayout& layout);

  const std::vector<Matrix>& c_blocks() const noexcept { return c_blocks_; }
  const std::vector<Matrix>& d_blocks() const noexcept { return d_blocks_; }

  EquivalenceTransform inverse() const;
  // The transform equal to applying *this first and then `next`:
  // C = C_next * C_this and D = D_this * D_next, blockwise.
  EquivalenceTransform then(const EquivalenceTransform& next) const;

  void require_matches(const SpaceLayout& layout) const;

 private:
  std::vector<Matrix> c_blocks_;
  std::vector<Matrix> d_blocks_;
};

// Q'_{ji} = D_j^{-1} Q_{ji} C_i^{-1}; weights and layout unchanged.
FrblDatum apply_equivalence(const FrblDatum& datum, const EquivalenceTransform& t);

}  // namespace frbl
