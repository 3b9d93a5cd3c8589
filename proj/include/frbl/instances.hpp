#pragma once

#include "frbl/datum.hpp"
#include "frbl/heatflow.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frbl {

// Prekopa-Leindler with weight lambda in (0, 1): E_1 = E_2 = E^1 = R,
// c = (lambda, 1 - lambda), d = (1), Q = (lambda, 1 - lambda).
FrblDatum prekopa_leindler(double lambda);

// The three-vector Mercedes frame of R^2: c = (1), d = (2/3, 2/3, 2/3).
FrblDatum young_frame();

// k = 1, c = (1), Q = id_2 split into two coordinate rows, d = (1, 1).
FrblDatum loomis_whitney_2d();

// k = 1, c = (1), E_1 = R, Q a column of ones, d = weights (positive, sum 1).
FrblDatum holder(const std::vector<double>& weights);

struct InstanceSpec {
  std::string name;  // prekopa-leindler, young-frame, loomis-whitney-2d, holder, custom
  std::optional<double> lambda;
  std::vector<double> weights;
  std::string path;  // custom only
};

// Throws InvalidInput for an unknown name or out-of-range parameters.
FrblDatum generate_instance(const InstanceSpec& spec);

std::vector<std::string_view> instance_names();

// Sampled inputs for the grid checks. e0_grid is only used by the monotone
// functional.
struct GridSet {
  std::vector<GridFunction> f;
  std::vector<GridFunction> g;
  std::optional<UniformGrid> e0_grid;
};

// exp(-1 / (1 - s^2)) on (-1, 1), zero elsewhere.
double bump(double s);

// PL(1/2) with f_1 = f_2 = g = exp(-x^2). The g grid is twice as fine as the
// f grids, so every (x_1 + x_2) / 2 lands on a g node.
GridSet prekopa_leindler_gaussian_grids();

// Young frame with f(x) = prod_j bump(u_j . x)^{2/3} and g_j(s) = bump(s / rho).
GridSet young_bump_grids(double rho = 1.1);

// Young frame inputs for the monotone functional, on padded g grids.
GridSet young_monotone_grids(double rho = 1.1);

// Loomis-Whitney with box indicators g_j = 1_{[-1, 1]}.
GridSet loomis_whitney_box_grids();

std::vector<std::string_view> grid_set_names();
GridSet bundled_grid_set(std::string_view name);

}  // namespace frbl
