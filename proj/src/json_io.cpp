#include "frbl/json_io.hpp"

#include "frbl/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace frbl {

namespace {

const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object()) throw InvalidInput(what + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(what + ": missing key '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InvalidInput(what + ": expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

std::vector<int> integers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + ": expected an array of integers");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw InvalidInput(what + ": expected integers");
    const auto v = x.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw InvalidInput(what + ": integer out of range");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void write_csv_number(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
  } else {
    os << v;
  }
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw InvalidInput(what + ": expected an array of rows");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InvalidInput(what + ": rows have different lengths");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = number(row[c], what);
  }
  return m;
}

Json datum_to_json(const FrblDatum& datum) {
  Json j;
  j["in_dims"] = datum.layout().in_dims();
  j["out_dims"] = datum.layout().out_dims();
  j["c"] = datum.c();
  j["d"] = datum.d();
  j["Q"] = matrix_to_json(datum.q());
  return j;
}

FrblDatum datum_from_json(const Json& j) {
  const std::string what = "datum";
  DatumCandidate raw;
  raw.in_dims = integers(field(j, "in_dims", what), "in_dims");
  raw.out_dims = integers(field(j, "out_dims", what), "out_dims");
  raw.c = numbers(field(j, "c", what), "c");
  raw.d = numbers(field(j, "d", what), "d");
  raw.q = matrix_from_json(field(j, "Q", what), "Q");
  return validate_datum(raw);
}

FrblDatum read_datum_file(const std::string& path) { return datum_from_json(read_json_file(path)); }

Json transform_to_json(const EquivalenceTransform& t) {
  Json c = Json::array();
  Json d = Json::array();
  for (const auto& b : t.c_blocks()) c.push_back(matrix_to_json(b));
  for (const auto& b : t.d_blocks()) d.push_back(matrix_to_json(b));
  return Json{{"C", c}, {"D", d}};
}

EquivalenceTransform transform_from_json(const Json& j) {
  auto blocks = [&](const char* key) {
    const auto& arr = field(j, key, "transform");
    if (!arr.is_array()) throw InvalidInput(std::string("transform: '") + key + "' must be an array");
    std::vector<Matrix> out;
    for (const auto& b : arr) out.push_back(matrix_from_json(b, key));
    return out;
  };
  return EquivalenceTransform(blocks("C"), blocks("D"));
}

Json certificate_to_json(const GeometricCertificate& cert) {
  Json j;
  j["verdict"] = std::string(to_string(cert.verdict));
  j["loewner_min_eig"] = cert.loewner_min_eig;
  j["sigma"] = cert.sigma ? matrix_to_json(cert.sigma->matrix()) : Json(nullptr);
  j["residual_in"] = cert.residual_in;
  j["residual_out"] = cert.residual_out;
  j["iterations"] = cert.iterations;
  j["reason"] = cert.reason;
  j["sigma_min_eig"] = cert.sigma_min_eig;
  j["tolerances"] = Json{{"loewner", cert.options.loewner_tol},
                         {"feasibility", cert.options.feasibility_tol},
                         {"max_iter", cert.options.max_iter}};
  return j;
}

Json sigma_search_to_json(const SigmaSearch& search, const SigmaSearchOptions& options) {
  Json j;
  j["found"] = search.found;
  j["sigma"] = search.sigma ? matrix_to_json(search.sigma->matrix()) : Json(nullptr);
  j["sigma_min_eig"] = search.sigma_min_eig;
  j["residual_in"] = search.residual_in;
  j["residual_out"] = search.residual_out;
  j["iterations"] = search.iterations;
  j["reason"] = search.reason;
  j["tolerances"] = Json{{"feasibility", options.tol}, {"max_iter", options.max_iter}};
  return j;
}

Json gaussian_to_json(const CenteredGaussian& g) {
  return Json{{"log_prefactor", g.log_prefactor()}, {"form", matrix_to_json(g.form().matrix())}};
}

CenteredGaussian gaussian_from_json(const Json& j) {
  const double l = number(field(j, "log_prefactor", "gaussian"), "log_prefactor");
  const Matrix form = matrix_from_json(field(j, "form", "gaussian"), "form");
  if (form.rows() != form.cols() || form.rows() == 0) throw InvalidInput("gaussian form must be square and non-empty");
  return CenteredGaussian(l, SymMatrix(form));
}

Json tuple_to_json(const GaussianTuple& tuple) {
  Json f = Json::array();
  Json g = Json::array();
  for (const auto& x : tuple.f) f.push_back(gaussian_to_json(x));
  for (const auto& x : tuple.g) g.push_back(gaussian_to_json(x));
  return Json{{"f", f}, {"g", g}};
}

GaussianTuple tuple_from_json(const Json& j) {
  GaussianTuple t;
  for (const char* key : {"f", "g"}) {
    const auto& arr = field(j, key, "gaussian tuple");
    if (!arr.is_array()) throw InvalidInput(std::string("gaussian tuple: '") + key + "' must be an array");
    auto& dst = key[0] == 'f' ? t.f : t.g;
    for (const auto& x : arr) dst.push_back(gaussian_from_json(x));
  }
  return t;
}

Json grid_to_json(const UniformGrid& grid) { return Json{{"lo", grid.lo()}, {"hi", grid.hi()}, {"n", grid.n()}}; }

UniformGrid grid_from_json(const Json& j) {
  return UniformGrid(numbers(field(j, "lo", "grid"), "lo"), numbers(field(j, "hi", "grid"), "hi"),
                     integers(field(j, "n", "grid"), "n"));
}

Json grid_function_to_json(const GridFunction& f) {
  Json j = grid_to_json(f.grid());
  j["values"] = f.values();
  return j;
}

GridFunction grid_function_from_json(const Json& j) {
  return GridFunction(grid_from_json(j), numbers(field(j, "values", "grid"), "values"));
}

Json grid_set_to_json(const GridSet& set) {
  Json f = Json::array();
  Json g = Json::array();
  for (const auto& x : set.f) f.push_back(grid_function_to_json(x));
  for (const auto& x : set.g) g.push_back(grid_function_to_json(x));
  Json j{{"f", f}, {"g", g}};
  if (set.e0_grid) j["e0_grid"] = grid_to_json(*set.e0_grid);
  return j;
}

GridSet grid_set_from_json(const Json& j) {
  GridSet set;
  for (const char* key : {"f", "g"}) {
    const auto& arr = field(j, key, "grid set");
    if (!arr.is_array()) throw InvalidInput(std::string("grid set: '") + key + "' must be an array");
    auto& dst = key[0] == 'f' ? set.f : set.g;
    for (const auto& x : arr) dst.push_back(grid_function_from_json(x));
  }
  if (j.contains("e0_grid") && !j["e0_grid"].is_null()) set.e0_grid = grid_from_json(j["e0_grid"]);
  return set;
}

void write_defect_csv(std::ostream& os, const DefectField& field) {
  const int dim = field.e0_grid.dim();
  os.precision(17);
  os << "t,min_defect";
  for (int a = 0; a < dim; ++a) os << ",argmin_x" << a;
  os << ",max_g_side,evaluated,skipped,holds\n";
  for (const auto& s : field.samples) {
    os << s.t << ',';
    write_csv_number(os, s.min_defect);
    for (int a = 0; a < dim; ++a) {
      os << ',';
      write_csv_number(os, a < s.argmin.size() ? s.argmin(a) : std::nan(""));
    }
    os << ',' << s.max_g_side << ',' << s.evaluated << ',' << s.skipped << ',' << (s.holds ? 1 : 0) << '\n';
  }
}

void write_defect_field_csv(std::ostream& os, const DefectField& field) {
  const auto& grid = field.e0_grid;
  os.precision(17);
  os << 't';
  for (int a = 0; a < grid.dim(); ++a) os << ",x" << a;
  os << ",defect\n";
  for (const auto& s : field.samples) {
    if (s.field.empty()) continue;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const Vector x = grid.node(n);
      os << s.t;
      for (int a = 0; a < grid.dim(); ++a) os << ',' << x(a);
      os << ',';
      write_csv_number(os, s.field[n]);
      os << '\n';
    }
  }
}

void write_monotone_csv(std::ostream& os, const std::vector<MonotoneSample>& samples) {
  os.precision(17);
  os << "t,Q\n";
  for (const auto& s : samples) os << s.t << ',' << s.value << '\n';
}

}  // namespace frbl
