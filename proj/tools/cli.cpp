#include "cli.hpp"

#include "frbl/error.hpp"
#include "frbl/gaussian.hpp"
#include "frbl/geometry.hpp"
#include "frbl/heatflow.hpp"
#include "frbl/instances.hpp"
#include "frbl/json_io.hpp"
#include "frbl/sampling.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace frbl::cli {

namespace {

struct Sink {
  std::ostream& out;
  std::string path;

  // Writes to the --out file when one was given.
  void emit(const std::function<void(std::ostream&)>& write) const {
    if (path.empty()) {
      write(out);
      return;
    }
    std::ofstream file(path);
    if (!file) throw InvalidInput("cannot write '" + path + "'");
    write(file);
  }
  void emit_json(const Json& j) const {
    emit([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
};

struct GenArgs {
  std::string name;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> weights;
  std::string path;
  std::string grids;
  std::string tuple;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

struct CheckArgs {
  std::string datum;
  double tol = kDefaultFeasibilityTol;
  double loewner_tol = kDefaultLoewnerTol;
  int max_iter = kDefaultMaxIter;
  std::string out;
};

struct GaussianArgs {
  std::string datum;
  std::string tuple;
  std::string op = "ratio";
  double tol = 1e-9;
  bool as_weights = false;
  std::vector<double> times{0.1, 1.0, 10.0};
  int samples = 0;
  std::uint64_t seed = kDefaultSeed;
  int max_iter = kDefaultMaxIter;
  std::string out;
};

struct FlowArgs {
  std::string datum;
  std::string grids;
  std::vector<double> times{0.1, 0.5, 1.0};
  double tol = -1.0;  // command default when negative
  double delta = 0.0;
  bool monotone = false;
  std::string full_field;
  std::string out;
};

FrblDatum datum_for_gen(const GenArgs& a) {
  InstanceSpec spec{a.name, std::nullopt, a.weights, a.path};
  if (!std::isnan(a.lambda)) spec.lambda = a.lambda;
  return generate_instance(spec);
}

int cmd_gen(const GenArgs& a, const Sink& sink) {
  if (!a.grids.empty()) {
    sink.emit_json(grid_set_to_json(bundled_grid_set(a.grids)));
    return kHolds;
  }
  if (a.name.empty()) throw InvalidInput("gen needs an instance name or --grids");
  const FrblDatum datum = datum_for_gen(a);
  if (a.tuple.empty()) {
    sink.emit_json(datum_to_json(datum));
  } else if (a.tuple == "standard") {
    sink.emit_json(tuple_to_json(standard_tuple(datum)));
  } else if (a.tuple == "random") {
    Rng rng(a.seed);
    sink.emit_json(tuple_to_json(sample_admissible_tuple(datum, rng)));
  } else {
    throw InvalidInput("--tuple must be 'standard' or 'random'");
  }
  return kHolds;
}

CertifyOptions certify_options(double tol, double loewner_tol, int max_iter) {
  if (!(tol > 0.0) || !(loewner_tol >= 0.0)) throw InvalidInput("tolerances must be positive");
  if (max_iter < 1) throw InvalidInput("--max-iter must be >= 1");
  return {loewner_tol, tol, max_iter};
}

int cmd_check(const CheckArgs& a, const Sink& sink) {
  const FrblDatum datum = read_datum_file(a.datum);
  const auto cert = check_geometric(datum, certify_options(a.tol, a.loewner_tol, a.max_iter));
  spdlog::info("check: {} after {} iterations ({})", to_string(cert.verdict), cert.iterations, cert.reason);
  sink.emit_json(certificate_to_json(cert));
  return cert.is_geometric() ? kHolds : kFails;
}

int cmd_sigma(const CheckArgs& a, const Sink& sink) {
  const FrblDatum datum = read_datum_file(a.datum);
  certify_options(a.tol, a.loewner_tol, a.max_iter);
  SigmaSearchOptions opts{a.tol, a.max_iter, false};
  const auto search = find_sigma(datum, opts);
  spdlog::info("sigma: {} after {} iterations", search.reason, search.iterations);
  sink.emit_json(sigma_search_to_json(search, opts));
  return search.found ? kHolds : kFails;
}

Json relation_json(const RelationCheck& r) {
  return Json{{"holds", r.holds}, {"form_gap_min_eig", r.form_gap_min_eig}, {"prefactor_gap", r.prefactor_gap}};
}

// Runs `op` on the tuple file or on seeded random admissible tuples.
std::vector<GaussianTuple> tuples_for(const GaussianArgs& a, const FrblDatum& datum) {
  if (a.samples > 0) {
    Rng rng(a.seed);
    std::vector<GaussianTuple> out;
    for (int s = 0; s < a.samples; ++s) out.push_back(sample_admissible_tuple(datum, rng));
    return out;
  }
  if (a.tuple.empty()) throw InvalidInput("gaussian needs a tuple file or --samples");
  GaussianTuple t = tuple_from_json(read_json_file(a.tuple));
  require_matches(datum, t);
  return {std::move(t)};
}

int cmd_gaussian(const GaussianArgs& a, const Sink& sink) {
  if (!(a.tol > 0.0)) throw InvalidInput("--tol must be positive");
  const FrblDatum datum = read_datum_file(a.datum);
  const CertifyOptions certify{kDefaultLoewnerTol, kDefaultFeasibilityTol, a.max_iter};
  Json report;
  report["op"] = a.op;
  report["tolerances"] = Json{{"tol", a.tol}};
  if (a.samples > 0) report["samples"] = Json{{"count", a.samples}, {"seed", a.seed}};

  if (a.op == "geometrize") {
    const auto tuples = tuples_for(a, datum);
    if (tuples.size() != 1) throw InvalidInput("geometrize takes a single tuple file");
    std::vector<SymMatrix> w_in, w_out;
    if (a.as_weights) {
      for (const auto& f : tuples[0].f) w_in.push_back(f.form());
      for (const auto& g : tuples[0].g) w_out.push_back(g.form());
    } else {
      std::tie(w_in, w_out) = heat_weights_of(tuples[0]);
    }
    const auto geo = geometrize_from_extremizers(datum, w_in, w_out, certify);
    report["transform"] = transform_to_json(geo.transform);
    report["datum"] = datum_to_json(geo.datum);
    report["certificate"] = certificate_to_json(geo.certificate);
    sink.emit_json(report);
    return geo.certificate.is_geometric() ? kHolds : kFails;
  }

  const auto tuples = tuples_for(a, datum);
  const bool single = a.samples == 0;

  if (a.op == "relation") {
    bool all = true;
    Json items = Json::array();
    for (const auto& t : tuples) {
      const auto r = relation_check(datum, t, a.tol);
      all = all && r.holds;
      items.push_back(relation_json(r));
    }
    if (single) {
      report.update(items[0]);
    } else {
      report["all_hold"] = all;
      report["results"] = items;
    }
    sink.emit_json(report);
    return all ? kHolds : kFails;
  }

  if (a.op == "ratio") {
    const bool geometric = check_geometric(datum, certify).is_geometric();
    double max_ratio = 0.0;
    bool bound_ok = true;
    Json items = Json::array();
    for (const auto& t : tuples) {
      const double lr = log_frbl_ratio(datum, t);
      const bool admissible = relation_check(datum, t).holds;
      // For geometric data every admissible tuple has ratio <= 1.
      const bool ok = !(geometric && admissible) || lr <= std::log1p(a.tol);
      bound_ok = bound_ok && ok;
      max_ratio = std::max(max_ratio, std::exp(lr));
      items.push_back(Json{{"ratio", std::exp(lr)}, {"log_ratio", lr}, {"admissible", admissible}});
    }
    report["geometric"] = geometric;
    if (single) {
      report.update(items[0]);
    } else {
      report["max_ratio"] = max_ratio;
    }
    report["bound_holds"] = bound_ok;
    sink.emit_json(report);
    return bound_ok ? kHolds : kFails;
  }

  if (a.op == "extremizer") {
    if (!single) throw InvalidInput("extremizer takes a single tuple file");
    ExtremizerOptions opts;
    opts.tol = a.tol;
    opts.certify = certify;
    const auto r = extremizer_check(datum, tuples[0], opts);
    report["verdict"] = std::string(to_string(r.verdict));
    report["log_ratio"] = r.log_ratio;
    report["ratio"] = std::exp(r.log_ratio);
    report["log_reference"] = std::isnan(r.log_reference) ? Json(nullptr) : Json(r.log_reference);
    report["log_det_formula"] = r.log_det_formula;
    report["reference_source"] = r.reference_source;
    sink.emit_json(report);
    return r.verdict == ExtremizerVerdict::extremizer ? kHolds : kFails;
  }

  if (a.op == "flow") {
    for (double t : a.times) {
      if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("--times must be finite and >= 0");
    }
    bool all = true;
    double worst_gap = std::numeric_limits<double>::infinity();
    Json rows = Json::array();
    for (const auto& t : tuples) {
      if (!relation_check(datum, t, a.tol).holds) throw PreconditionViolated("tuple does not satisfy the relation at t = 0");
      for (double time : a.times) {
        const auto r = relation_check(datum, time == 0.0 ? t : evolve_tuple(t, time), a.tol);
        all = all && r.holds;
        worst_gap = std::min(worst_gap, r.form_gap_min_eig);
        if (single) {
          Json row = relation_json(r);
          row["t"] = time;
          rows.push_back(row);
        }
      }
    }
    report["times"] = a.times;
    if (single) report["results"] = rows;
    report["min_form_gap"] = worst_gap;
    report["all_hold"] = all;
    sink.emit_json(report);
    return all ? kHolds : kFails;
  }

  throw InvalidInput("unknown --op '" + a.op + "'");
}

GridSet load_grids(const std::string& path) { return grid_set_from_json(read_json_file(path)); }

bool nondecreasing(const std::vector<MonotoneSample>& q, double rel) {
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i].value < q[i - 1].value - rel * std::abs(q[i - 1].value)) return false;
  }
  return true;
}

int cmd_flow_verify(const FlowArgs& a, const Sink& sink) {
  const FrblDatum datum = read_datum_file(a.datum);
  const GridSet grids = load_grids(a.grids);
  PreservationOptions opts;
  opts.tol = a.tol < 0 ? 1e-4 : a.tol;
  opts.delta = a.delta;
  opts.keep_field = !a.full_field.empty();
  const auto field = verify_preservation(datum, grids.f, grids.g, a.times, opts);
  for (const auto& s : field.samples) {
    spdlog::info("t = {}: min defect {:.3e}, {} nodes, {} skipped", s.t, s.min_defect, s.evaluated, s.skipped);
  }

  std::optional<std::vector<MonotoneSample>> q;
  if (a.monotone) {
    if (!grids.e0_grid) throw InvalidInput("--monotone needs an e0_grid in the grid file");
    q = monotone_functional(datum, grids.g, a.times, *grids.e0_grid);
  }
  sink.emit([&](std::ostream& os) {
    os << "# tol=" << opts.tol << " delta=" << opts.delta << '\n';
    write_defect_csv(os, field);
    if (q) {
      os << '\n';
      write_monotone_csv(os, *q);
    }
  });
  if (!a.full_field.empty()) Sink{sink.out, a.full_field}.emit([&](std::ostream& os) { write_defect_field_csv(os, field); });
  return field.holds ? kHolds : kFails;
}

int cmd_flow_monotone(const FlowArgs& a, const Sink& sink) {
  const FrblDatum datum = read_datum_file(a.datum);
  const GridSet grids = load_grids(a.grids);
  if (!grids.e0_grid) throw InvalidInput("flow-monotone needs an e0_grid in the grid file");
  const double rel = a.tol < 0 ? 1e-5 : a.tol;
  std::vector<double> times = a.times;
  std::sort(times.begin(), times.end());
  const auto q = monotone_functional(datum, grids.g, times, *grids.e0_grid);
  const bool ok = nondecreasing(q, rel);
  sink.emit([&](std::ostream& os) {
    os << "# relative_slack=" << rel << '\n';
    write_monotone_csv(os, q);
  });
  return ok ? kHolds : kFails;
}

void add_times(CLI::App* app, std::vector<double>& times, const std::string& help) {
  app->add_option("--times", times, help)->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forward-reverse Brascamp-Lieb verification toolkit", "frbl"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Emit an instance datum, a tuple for it, or a bundled grid set");
  gen_cmd->add_option("name", gen.name, "prekopa-leindler | young-frame | loomis-whitney-2d | holder | custom");
  gen_cmd->add_option("--lambda", gen.lambda, "Prekopa-Leindler weight in (0, 1)");
  gen_cmd->add_option("--weights", gen.weights, "Holder weights, positive, summing to 1")->delimiter(',');
  gen_cmd->add_option("--path", gen.path, "Datum file for the custom instance");
  gen_cmd->add_option("--grids", gen.grids, "Bundled grid set name");
  gen_cmd->add_option("--tuple", gen.tuple, "Emit a Gaussian tuple for the datum: standard | random");
  gen_cmd->add_option("--seed", gen.seed, "Seed for --tuple random");
  gen_cmd->add_option("--out", gen.out, "Output file");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Certify whether a datum is geometric");
  CheckArgs sigma;
  auto* sigma_cmd = app.add_subcommand("sigma", "Search for Sigma only");
  for (auto [cmd, a] : {std::pair{check_cmd, &check}, std::pair{sigma_cmd, &sigma}}) {
    cmd->add_option("datum", a->datum, "Datum JSON file")->required();
    cmd->add_option("--tol", a->tol, "Feasibility tolerance");
    cmd->add_option("--loewner-tol", a->loewner_tol, "Loewner tolerance");
    cmd->add_option("--max-iter", a->max_iter, "Dykstra iteration cap");
    cmd->add_option("--out", a->out, "Output file");
  }

  GaussianArgs gauss;
  auto* gauss_cmd = app.add_subcommand("gaussian", "Gaussian relation, ratio, extremizer, geometrize or flow");
  gauss_cmd->add_option("datum", gauss.datum, "Datum JSON file")->required();
  gauss_cmd->add_option("tuple", gauss.tuple, "Gaussian tuple JSON file");
  gauss_cmd->add_option("--op", gauss.op, "relation | ratio | extremizer | geometrize | flow")
      ->check(CLI::IsMember({"relation", "ratio", "extremizer", "geometrize", "flow"}));
  gauss_cmd->add_option("--tol", gauss.tol, "Tolerance");
  gauss_cmd->add_flag("--as-weights", gauss.as_weights, "geometrize: read the tuple forms as heat weights");
  add_times(gauss_cmd, gauss.times, "flow: evolution times");
  gauss_cmd->add_option("--samples", gauss.samples, "Use N seeded random admissible tuples instead of a file");
  gauss_cmd->add_option("--seed", gauss.seed, "Seed for --samples");
  gauss_cmd->add_option("--max-iter", gauss.max_iter, "Dykstra iteration cap");
  gauss_cmd->add_option("--out", gauss.out, "Output file");

  FlowArgs flow;
  auto* flow_cmd = app.add_subcommand("flow-verify", "Check the evolved relation on grid functions");
  FlowArgs mono;
  mono.times = {0.0, 0.25, 0.5, 1.0, 2.0};
  auto* mono_cmd = app.add_subcommand("flow-monotone", "Tabulate Q(t) and check it is nondecreasing");
  for (auto [cmd, a] : {std::pair{flow_cmd, &flow}, std::pair{mono_cmd, &mono}}) {
    cmd->add_option("datum", a->datum, "Datum JSON file")->required();
    cmd->add_option("grids", a->grids, "Grid set JSON file")->required();
    add_times(cmd, a->times, "Comma-separated times");
    cmd->add_option("--tol", a->tol, "Defect tolerance (flow-verify) or relative slack (flow-monotone)");
    cmd->add_option("--out", a->out, "Output file");
  }
  flow_cmd->add_option("--delta", flow.delta, "Add delta to every g before evolving");
  flow_cmd->add_flag("--monotone", flow.monotone, "Append the Q(t) table");
  flow_cmd->add_option("--full-field", flow.full_field, "Write the per-node defect CSV to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kHolds;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kHolds;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, {out, gen.out});
    if (check_cmd->parsed()) return cmd_check(check, {out, check.out});
    if (sigma_cmd->parsed()) return cmd_sigma(sigma, {out, sigma.out});
    if (gauss_cmd->parsed()) return cmd_gaussian(gauss, {out, gauss.out});
    if (flow_cmd->parsed()) return cmd_flow_verify(flow, {out, flow.out});
    if (mono_cmd->parsed()) return cmd_flow_monotone(mono, {out, mono.out});
  } catch (const PreconditionViolated& e) {
    err << "precondition violated: " << e.what() << '\n';
    for (const auto& d : e.details()) err << "  " << d << '\n';
    return kFails;
  } catch (const InvalidDatum& e) {
    err << "invalid datum:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace frbl::cli
