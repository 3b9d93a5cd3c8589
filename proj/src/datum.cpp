#include "frbl/datum.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace frbl {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::vector<int> prefix_sums(const std::vector<int>& dims) {
  std::vector<int> offsets(dims.size() + 1, 0);
  std::partial_sum(dims.begin(), dims.end(), offsets.begin() + 1);
  return offsets;
}

}  // namespace

InvalidDatum::InvalidDatum(std::vector<std::string> violations)
    : InvalidInput("invalid datum: " + join(violations)), violations_(std::move(violations)) {}

SpaceLayout::SpaceLayout(std::vector<int> in_dims, std::vector<int> out_dims)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)) {
  if (in_dims_.empty() || out_dims_.empty()) {
    throw InvalidInput("layout needs at least one input and one output space");
  }
  for (int n : in_dims_) {
    if (n < 1) throw InvalidInput("input space dimension " + std::to_string(n) + " < 1");
  }
  for (int n : out_dims_) {
    if (n < 1) throw InvalidInput("output space dimension " + std::to_string(n) + " < 1");
  }
  in_offsets_ = prefix_sums(in_dims_);
  out_offsets_ = prefix_sums(out_dims_);
}

FrblDatum::FrblDatum(SpaceLayout layout, std::vector<double> c, std::vector<double> d, Matrix q)
    : layout_(std::move(layout)), c_(std::move(c)), d_(std::move(d)), q_(std::move(q)) {}

Matrix FrblDatum::block(int j, int i) const {
  if (i < 0 || i >= k() || j < 0 || j >= m()) {
    throw InvalidInput("block index (" + std::to_string(j) + ", " + std::to_string(i) +
                       ") out of range");
  }
  return q_.block(layout_.out_offset(j), layout_.in_offset(i), layout_.out_dim(j),
                  layout_.in_dim(i));
}

Matrix FrblDatum::row_block(int j) const {
  if (j < 0 || j >= m()) throw InvalidInput("row block index " + std::to_string(j) + " out of range");
  return q_.middleRows(layout_.out_offset(j), layout_.out_dim(j));
}

DatumCandidate FrblDatum::to_candidate() const {
  return {layout_.in_dims(), layout_.out_dims(), c_, d_, q_};
}

std::vector<std::string> datum_violations(const DatumCandidate& raw) {
  std::vector<std::string> out;
  const auto bad_dim = [](int n) { return n < 1; };
  if (raw.in_dims.empty()) out.emplace_back("no input spaces (k = 0)");
  if (raw.out_dims.empty()) out.emplace_back("no output spaces (m = 0)");
  const bool dims_ok = std::none_of(raw.in_dims.begin(), raw.in_dims.end(), bad_dim) &&
                       std::none_of(raw.out_dims.begin(), raw.out_dims.end(), bad_dim);
  if (!dims_ok) out.emplace_back("space dimensions must be >= 1");

  if (raw.c.size() != raw.in_dims.size()) {
    out.push_back("c has " + std::to_string(raw.c.size()) + " entries, expected " +
                  std::to_string(raw.in_dims.size()));
  }
  if (raw.d.size() != raw.out_dims.size()) {
    out.push_back("d has " + std::to_string(raw.d.size()) + " entries, expected " +
                  std::to_string(raw.out_dims.size()));
  }
  for (std::size_t i = 0; i < raw.c.size(); ++i) {
    if (!(raw.c[i] > 0) || !std::isfinite(raw.c[i])) {
      out.push_back("c[" + std::to_string(i) + "] = " + std::to_string(raw.c[i]) + " is not positive");
    }
  }
  for (std::size_t j = 0; j < raw.d.size(); ++j) {
    if (!(raw.d[j] > 0) || !std::isfinite(raw.d[j])) {
      out.push_back("d[" + std::to_string(j) + "] = " + std::to_string(raw.d[j]) + " is not positive");
    }
  }

  const long total_in = std::accumulate(raw.in_dims.begin(), raw.in_dims.end(), 0L);
  const long total_out = std::accumulate(raw.out_dims.begin(), raw.out_dims.end(), 0L);
  if (raw.q.rows() != total_out || raw.q.cols() != total_in) {
    out.push_back("Q is " + std::to_string(raw.q.rows()) + "x" + std::to_string(raw.q.cols()) +
                  ", layout requires " + std::to_string(total_out) + "x" + std::to_string(total_in));
  } else if (!raw.q.allFinite()) {
    out.emplace_back("Q has non-finite entries");
  }

  if (raw.c.size() == raw.in_dims.size() && raw.d.size() == raw.out_dims.size() && dims_ok) {
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < raw.c.size(); ++i) lhs += raw.c[i] * raw.in_dims[i];
    for (std::size_t j = 0; j < raw.d.size(); ++j) rhs += raw.d[j] * raw.out_dims[j];
    if (!(std::abs(lhs - rhs) <= kScalingTol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "scaling condition fails: sum c_i dim E_i = " << lhs << " but sum d_j dim E^j = " << rhs;
      out.push_back(msg.str());
    }
  }
  return out;
}

FrblDatum validate_datum(const DatumCandidate& raw) {
  auto violations = datum_violations(raw);
  if (!violations.empty()) throw InvalidDatum(std::move(violations));
  return FrblDatum(SpaceLayout(raw.in_dims, raw.out_dims), raw.c, raw.d, raw.q);
}

LambdaMaps lambda_maps(const FrblDatum& datum) {
  const auto& layout = datum.layout();
  Vector diag_c(layout.total_in());
  Vector diag_d(layout.total_out());
  for (int i = 0; i < layout.k(); ++i) {
    diag_c.segment(layout.in_offset(i), layout.in_dim(i)).setConstant(datum.c()[i]);
  }
  for (int j = 0; j < layout.m(); ++j) {
    diag_d.segment(layout.out_offset(j), layout.out_dim(j)).setConstant(datum.d()[j]);
  }
  return {SymMatrix::diagonal(diag_c), SymMatrix::diagonal(diag_d)};
}

namespace {

void check_square_invertible(const Matrix& b, const char* family, std::size_t idx) {
  const std::string name = std::string(family) + "[" + std::to_string(idx) + "]";
  if (b.rows() != b.cols()) throw InvalidInput(name + " is not square");
  if (!b.allFinite()) throw InvalidInput(name + " has non-finite entries");
  const double det = b.determinant();
  if (!(std::abs(det) > kSingularDetTol)) {
    throw SingularTransform(name + " is singular (|det| = " + std::to_string(std::abs(det)) + ")");
  }
}

}  // namespace

EquivalenceTransform::EquivalenceTransform(std::vector<Matrix> c_blocks, std::vector<Matrix> d_blocks)
    : c_blocks_(std::move(c_blocks)), d_blocks_(std::move(d_blocks)) {
  for (std::size_t i = 0; i < c_blocks_.size(); ++i) check_square_invertible(c_blocks_[i], "C", i);
  for (std::size_t j = 0; j < d_blocks_.size(); ++j) check_square_invertible(d_blocks_[j], "D", j);
}

EquivalenceTransform EquivalenceTransform::identity(const SpaceLayout& layout) {
  std::vector<Matrix> c;
  std::vector<Matrix> d;
  for (int n : layout.in_dims()) c.push_back(Matrix::Identity(n, n));
  for (int n : layout.out_dims()) d.push_back(Matrix::Identity(n, n));
  return {std::move(c), std::move(d)};
}

EquivalenceTransform EquivalenceTransform::inverse() const {
  std::vector<Matrix> c;
  std::vector<Matrix> d;
  for (const auto& b : c_blocks_) c.push_back(b.inverse());
  for (const auto& b : d_blocks_) d.push_back(b.inverse());
  return {std::move(c), std::move(d)};
}

EquivalenceTransform EquivalenceTransform::then(const EquivalenceTransform& next) const {
  if (next.c_blocks_.size() != c_blocks_.size() || next.d_blocks_.size() != d_blocks_.size()) {
    throw InvalidInput("composing transforms with different block counts");
  }
  std::vector<Matrix> c;
  std::vector<Matrix> d;
  for (std::size_t i = 0; i < c_blocks_.size(); ++i) {
    if (next.c_blocks_[i].rows() != c_blocks_[i].rows()) throw InvalidInput("C block size mismatch");
    c.push_back(next.c_blocks_[i] * c_blocks_[i]);
  }
  for (std::size_t j = 0; j < d_blocks_.size(); ++j) {
    if (next.d_blocks_[j].rows() != d_blocks_[j].rows()) throw InvalidInput("D block size mismatch");
    d.push_back(d_blocks_[j] * next.d_blocks_[j]);
  }
  return {std::move(c), std::move(d)};
}

void EquivalenceTransform::require_matches(const SpaceLayout& layout) const {
  if (static_cast<int>(c_blocks_.size()) != layout.k() ||
      static_cast<int>(d_blocks_.size()) != layout.m()) {
    throw InvalidInput("transform has " + std::to_string(c_blocks_.size()) + "/" +
                       std::to_string(d_blocks_.size()) + " blocks, layout needs " +
                       std::to_string(layout.k()) + "/" + std::to_string(layout.m()));
  }
  for (int i = 0; i < layout.k(); ++i) {
    if (c_blocks_[i].rows() != layout.in_dim(i)) {
      throw InvalidInput("C[" + std::to_string(i) + "] does not match dim E_" + std::to_string(i));
    }
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (d_blocks_[j].rows() != layout.out_dim(j)) {
      throw InvalidInput("D[" + std::to_string(j) + "] does not match dim E^" + std::to_string(j));
    }
  }
}

FrblDatum apply_equivalence(const FrblDatum& datum, const EquivalenceTransform& t) {
  const auto& layout = datum.layout();
  t.require_matches(layout);
  std::vector<Matrix> c_inv;
  std::vector<Matrix> d_inv;
  for (const auto& b : t.c_blocks()) c_inv.push_back(b.inverse());
  for (const auto& b : t.d_blocks()) d_inv.push_back(b.inverse());

  Matrix q = datum.q();
  for (int j = 0; j < layout.m(); ++j) {
    for (int i = 0; i < layout.k(); ++i) {
      q.block(layout.out_offset(j), layout.in_offset(i), layout.out_dim(j), layout.in_dim(i)) =
          d_inv[j] * datum.block(j, i) * c_inv[i];
    }
  }
  auto raw = datum.to_candidate();
  raw.q = std::move(q);
  return validate_datum(raw);
}

}  // namespace frbl
