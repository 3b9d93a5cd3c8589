#include "frbl/instances.hpp"

#include "frbl/error.hpp"
#include "frbl/json_io.hpp"

#include <cmath>
#include <numeric>

namespace frbl {

namespace {

const double kSqrt3Half = std::sqrt(3.0) / 2.0;

Matrix frame_rows() {
  Matrix q(3, 2);
  q << 1.0, 0.0, -0.5, kSqrt3Half, -0.5, -kSqrt3Half;
  return q;
}

UniformGrid line(double lo, double hi, int n) { return UniformGrid({lo}, {hi}, {n}); }

GridFunction sample_line(double lo, double hi, int n, double (*f)(double)) {
  return GridFunction::sample(line(lo, hi, n), [f](const Vector& x) { return f(x(0)); });
}

double gaussian_profile(double s) { return std::exp(-s * s); }

double box(double s) { return std::abs(s) <= 1.0 ? 1.0 : 0.0; }

GridFunction frame_f(const UniformGrid& grid) {
  const Matrix rows = frame_rows();
  return GridFunction::sample(grid, [&rows](const Vector& x) {
    double v = 1.0;
    for (Index j = 0; j < 3; ++j) v *= std::pow(bump(rows.row(j).dot(x)), 2.0 / 3.0);
    return v;
  });
}

GridFunction scaled_bump(double lo, double hi, int n, double rho) {
  return GridFunction::sample(line(lo, hi, n), [rho](const Vector& x) { return bump(x(0) / rho); });
}

}  // namespace

FrblDatum prekopa_leindler(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("prekopa-leindler needs lambda in (0, 1)");
  Matrix q(1, 2);
  q << lambda, 1.0 - lambda;
  return validate_datum({{1, 1}, {1}, {lambda, 1.0 - lambda}, {1.0}, q});
}

FrblDatum young_frame() {
  const double w = 2.0 / 3.0;
  return validate_datum({{2}, {1, 1, 1}, {1.0}, {w, w, w}, frame_rows()});
}

FrblDatum loomis_whitney_2d() { return validate_datum({{2}, {1, 1}, {1.0}, {1.0, 1.0}, Matrix::Identity(2, 2)}); }

FrblDatum holder(const std::vector<double>& weights) {
  if (weights.empty()) throw InvalidInput("holder needs at least one weight");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("holder weights must be positive");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > kScalingTol) throw InvalidInput("holder weights must sum to 1");
  const int m = static_cast<int>(weights.size());
  return validate_datum({{1}, std::vector<int>(m, 1), {1.0}, weights, Matrix::Ones(m, 1)});
}

FrblDatum generate_instance(const InstanceSpec& spec) {
  if (spec.name == "prekopa-leindler") {
    if (!spec.lambda) throw InvalidInput("prekopa-leindler needs a lambda parameter");
    return prekopa_leindler(*spec.lambda);
  }
  if (spec.name == "young-frame") return young_frame();
  if (spec.name == "loomis-whitney-2d") return loomis_whitney_2d();
  if (spec.name == "holder") return holder(spec.weights);
  if (spec.name == "custom") {
    if (spec.path.empty()) throw InvalidInput("custom instance needs a datum file path");
    return read_datum_file(spec.path);
  }
  throw InvalidInput("unknown instance '" + spec.name + "'");
}

std::vector<std::string_view> instance_names() {
  return {"prekopa-leindler", "young-frame", "loomis-whitney-2d", "holder", "custom"};
}

double bump(double s) {
  const double r = 1.0 - s * s;
  return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
}

GridSet prekopa_leindler_gaussian_grids() {
  GridSet set;
  set.f.push_back(sample_line(-6.0, 6.0, 101, gaussian_profile));
  set.f.push_back(sample_line(-6.0, 6.0, 101, gaussian_profile));
  set.g.push_back(sample_line(-6.0, 6.0, 201, gaussian_profile));
  return set;
}

GridSet young_bump_grids(double rho) {
  if (!(rho >= 1.0)) throw InvalidInput("young bump grids need rho >= 1");
  GridSet set;
  set.f.push_back(frame_f(UniformGrid({-1.2, -1.2}, {1.2, 1.2}, {121, 121})));
  for (int j = 0; j < 3; ++j) set.g.push_back(scaled_bump(-2.0, 2.0, 201, rho));
  return set;
}

GridSet young_monotone_grids(double rho) {
  if (!(rho >= 1.0)) throw InvalidInput("young bump grids need rho >= 1");
  GridSet set;
  set.f.push_back(frame_f(UniformGrid({-1.2, -1.2}, {1.2, 1.2}, {121, 121})));
  for (int j = 0; j < 3; ++j) set.g.push_back(scaled_bump(-18.0, 18.0, 1201, rho));
  set.e0_grid = UniformGrid({-12.0, -12.0}, {12.0, 12.0}, {481, 481});
  return set;
}

GridSet loomis_whitney_box_grids() {
  GridSet set;
  set.f.push_back(GridFunction::sample(UniformGrid({-3.0, -3.0}, {3.0, 3.0}, {121, 121}),
                                       [](const Vector& x) { return box(x(0)) * box(x(1)); }));
  for (int j = 0; j < 2; ++j) set.g.push_back(sample_line(-20.0, 20.0, 801, box));
  set.e0_grid = UniformGrid({-20.0, -20.0}, {20.0, 20.0}, {801, 801});
  return set;
}

std::vector<std::string_view> grid_set_names() {
  return {"prekopa-leindler-gaussian", "young-bump", "young-monotone", "loomis-whitney-box"};
}

GridSet bundled_grid_set(std::string_view name) {
  if (name == "prekopa-leindler-gaussian") return prekopa_leindler_gaussian_grids();
  if (name == "young-bump") return young_bump_grids();
  if (name == "young-monotone") return young_monotone_grids();
  if (name == "loomis-whitney-box") return loomis_whitney_box_grids();
  throw InvalidInput("unknown grid set '" + std::string(name) + "'");
}

}  // namespace frbl
