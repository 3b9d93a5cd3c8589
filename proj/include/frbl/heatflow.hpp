#pragma once

#include "frbl/datum.hpp"
#include "frbl/linalg.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frbl {

// Uniform rectangular grid, nodes lo + idx * h per axis, flattened row-major
// (axis 0 varies slowest).
class UniformGrid {
 public:
  UniformGrid(std::vector<double> lo, std::vector<double> hi, std::vector<int> n);

  int dim() const noexcept { return static_cast<int>(n_.size()); }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  const std::vector<int>& n() const noexcept { return n_; }
  double spacing(int axis) const { return (hi_.at(axis) - lo_.at(axis)) / (n_.at(axis) - 1); }
  std::size_t size() const noexcept { return size_; }
  double coordinate(int axis, int idx) const { return lo_[axis] + idx * spacing(axis); }
  Vector node(std::size_t flat) const;
  std::vector<int> unravel(std::size_t flat) const;
  // Trapezoid weight of a node (product of per-axis weights).
  double weight(std::size_t flat) const;
  double max_extent() const;
  bool contains(const Vector& x) const;

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<int> n_;
  std::size_t size_ = 0;
};

// Non-negative samples of a function on one space (dimension 1 or 2).
class GridFunction {
 public:
  GridFunction(UniformGrid grid, std::vector<double> values);

  static GridFunction sample(const UniformGrid& grid, const std::function<double(const Vector&)>& f);

  const UniformGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  int dim() const noexcept { return grid_.dim(); }

  // Multilinear interpolation; nullopt outside the grid box.
  std::optional<double> interpolate(const Vector& x) const;
  // Interpolated value, zero outside the grid box.
  double value_or_zero(const Vector& x) const;

  double integral() const;  // trapezoid rule
  double sup() const;

  GridFunction plus_constant(double delta) const;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

// e^{t Delta_{V,A}} f by quadrature of the exact heat kernel over the grid
// nodes (trapezoid weights), f zero-extended outside the grid, kernel
// truncated at 8 sqrt(2 t lambda_max(A)). Output on the input grid.
// Throws AccuracyError if the truncation radius exceeds 10x the grid extent.
GridFunction heat_step(const GridFunction& f, double t, const SymMatrix& weight);
GridFunction heat_step(const GridFunction& f, double t);

// log (e^{t Delta_{V,A}} f)(x) at a single point, by log-sum-exp over the
// nodes. -inf if f vanishes identically.
double log_heat_value_at(const GridFunction& f, double t, const SymMatrix& weight, const Vector& x);

struct DefectSample {
  double t = 0.0;
  double min_defect = 0.0;
  Vector argmin;            // E_0 point of the minimum
  double max_g_side = 0.0;  // max over evaluated nodes of prod (g_j)^{d_j}
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // nodes where some Q_j x left the g_j grid
  bool holds = false;
  std::vector<double> field;  // per-node defect (NaN where skipped), if requested
};

struct DefectField {
  std::vector<DefectSample> samples;
  bool holds = false;
  double tol = 0.0;
  UniformGrid e0_grid;  // product of the f grids
};

struct PreservationOptions {
  double tol = 1e-4;
  // g_j is replaced by g_j + delta before evolution.
  double delta = 0.0;
  bool keep_field = false;
  // Heat weights per space; empty means the standard Laplacian everywhere.
  std::vector<SymMatrix> weights_in;
  std::vector<SymMatrix> weights_out;
};

// Checks prod (e^{t Delta} f_i)^{c_i}(pi_i x) <= prod (e^{t Delta} g_j)^{d_j}(pi_j Q x)
// at every node x of the product of the f grids, for each requested t. The
// t = 0 relation is checked first; if it fails PreconditionViolated lists the
// offending nodes. A node is evaluated only where every Q_j x is inside its
// g grid.
DefectField verify_preservation(const FrblDatum& datum, std::span<const GridFunction> f_grids,
                                std::span<const GridFunction> g_grids, std::span<const double> times,
                                const PreservationOptions& options = {});

struct MonotoneSample {
  double t = 0.0;
  double value = 0.0;
};

// Q(t) = int_{E_0} prod_j (e^{t Delta} g_j)^{d_j}(Q_j x) dx on the given E_0
// grid (trapezoid rule, g_j zero outside its grid). Needs k = 1 and c = (1).
std::vector<MonotoneSample> monotone_functional(const FrblDatum& datum, std::span<const GridFunction> g_grids,
                                                std::span<const double> times, const UniformGrid& e0_grid);

struct ConstantEstimate {
  double t = 0.0;
  double log_ratio = 0.0;
  double ratio = 0.0;
};

// prod ((4 pi t)^{n_i/2} e^{t Delta} f_i(0))^{c_i} / prod ((4 pi t)^{n_j/2} e^{t Delta} g_j(0))^{d_j}.
// By default first verifies the t = 0 relation like verify_preservation.
ConstantEstimate extract_constant(const FrblDatum& datum, std::span<const GridFunction> f_grids,
                                  std::span<const GridFunction> g_grids, double t_large,
                                  bool check_relation = true, double tol = 1e-4);

}  // namespace frbl
