#pragma once

#include "frbl/datum.hpp"
#include "frbl/gaussian.hpp"
#include "frbl/geometry.hpp"
#include "frbl/heatflow.hpp"
#include "frbl/instances.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace frbl {

using Json = nlohmann::ordered_json;

// Parse errors and missing or mistyped keys throw InvalidInput.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);

Json datum_to_json(const FrblDatum& datum);
FrblDatum datum_from_json(const Json& j);
FrblDatum read_datum_file(const std::string& path);

Json transform_to_json(const EquivalenceTransform& t);
EquivalenceTransform transform_from_json(const Json& j);

// Keys verdict, loewner_min_eig, sigma (or null), residual_in, residual_out,
// iterations, then reason, sigma_min_eig and the tolerances used.
Json certificate_to_json(const GeometricCertificate& cert);

Json sigma_search_to_json(const SigmaSearch& search, const SigmaSearchOptions& options);

Json gaussian_to_json(const CenteredGaussian& g);
CenteredGaussian gaussian_from_json(const Json& j);
Json tuple_to_json(const GaussianTuple& tuple);
GaussianTuple tuple_from_json(const Json& j);

Json grid_to_json(const UniformGrid& grid);
UniformGrid grid_from_json(const Json& j);
Json grid_function_to_json(const GridFunction& f);
GridFunction grid_function_from_json(const Json& j);

// { "f": [grid function], "g": [grid function], "e0_grid": {lo, hi, n} (optional) }.
Json grid_set_to_json(const GridSet& set);
GridSet grid_set_from_json(const Json& j);

// t, min_defect, argmin_x0.., max_g_side, evaluated, skipped, holds.
void write_defect_csv(std::ostream& os, const DefectField& field);
// One row per node for each sample that kept its field: t, x0.., defect.
void write_defect_field_csv(std::ostream& os, const DefectField& field);
void write_monotone_csv(std::ostream& os, const std::vector<MonotoneSample>& samples);

}  // namespace frbl
