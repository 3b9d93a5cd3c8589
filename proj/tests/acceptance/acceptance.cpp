// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.

#include "frbl/gaussian.hpp"
#include "frbl/geometry.hpp"
#include "frbl/heatflow.hpp"
#include "frbl/instances.hpp"
#include "frbl/sampling.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace frbl;

namespace {

constexpr double kResidualTol = 1e-8;
constexpr double kSigmaTol = 1e-8;
constexpr double kRuntimeCertify = 1.0;  // seconds per instance
constexpr double kLoewnerExpected = -1.5;
constexpr double kLoewnerMatch = 1e-9;
constexpr double kRatioOne = 1e-12;
constexpr double kRatioSlack = 1e-9;
constexpr double kFormGapTol = 1e-9;
constexpr double kDefectTol = 1e-4;
constexpr double kRuntimeGrid = 60.0;
constexpr double kQuadratureRel = 1e-6;
constexpr double kLongTimeTol = 1e-3;
constexpr double kKey1Slack = 1e-10;
constexpr double kMonotoneRel = 1e-5;
constexpr double kSemigroupTol = 1e-12;

constexpr int kTuples = 1000;
constexpr int kKey1Samples = 10000;
constexpr int kTracePairs = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Named {
  std::string name;
  FrblDatum datum;
};

std::vector<Named> geometric_instances() {
  return {{"pl-1/4", prekopa_leindler(0.25)}, {"pl-1/3", prekopa_leindler(1.0 / 3)},
          {"pl-1/2", prekopa_leindler(0.5)},  {"young-frame", young_frame()},
          {"loomis-whitney-2d", loomis_whitney_2d()}, {"holder", holder({0.5, 0.25, 0.25})}};
}

Outcome ac1() {
  Outcome o;
  double worst_runtime = 0.0, worst_sigma = 0.0, worst_res = 0.0;
  const std::vector<std::pair<FrblDatum, Matrix>> cases{
      {prekopa_leindler(0.25), Matrix::Ones(2, 2)},
      {prekopa_leindler(1.0 / 3), Matrix::Ones(2, 2)},
      {prekopa_leindler(0.5), Matrix::Ones(2, 2)},
      {young_frame(), Matrix::Identity(2, 2)},
      {loomis_whitney_2d(), Matrix::Identity(2, 2)}};
  for (const auto& [d, want] : cases) {
    const auto start = std::chrono::steady_clock::now();
    const auto cert = check_geometric(d);
    const double rt = seconds_since(start);
    worst_runtime = std::max(worst_runtime, rt);
    if (!cert.is_geometric() || !cert.sigma) {
      o.pass = false;
      continue;
    }
    worst_sigma = std::max(worst_sigma, (cert.sigma->matrix() - want).cwiseAbs().maxCoeff());
    worst_res = std::max({worst_res, cert.residual_in, cert.residual_out});
  }
  o.pass = o.pass && worst_sigma <= kSigmaTol && worst_res <= kResidualTol && worst_runtime < kRuntimeCertify;
  o.detail = fmt("max |Sigma - expected| = %.2e", worst_sigma) + fmt(", max residual = %.2e", worst_res) +
             fmt(", slowest = %.3f s", worst_runtime);
  return o;
}

Outcome ac2() {
  Matrix q(1, 2);
  q << 1.0, 1.0;
  const auto d = validate_datum({{1, 1}, {1}, {0.5, 0.5}, {1.0}, q});
  const auto cert = check_geometric(d);
  const std::vector<SymMatrix> in(2, SymMatrix::scalar(0.25)), out(1, SymMatrix::scalar(1.0));
  const auto geo = geometrize_from_extremizers(d, in, out);
  const double dev = (geo.datum.q() - Matrix::Constant(1, 2, 0.5)).cwiseAbs().maxCoeff();
  Outcome o;
  o.pass = !cert.loewner_ok && std::abs(cert.loewner_min_eig - kLoewnerExpected) <= kLoewnerMatch && dev <= 1e-12 &&
           geo.certificate.is_geometric();
  o.detail = fmt("loewner min eig = %.12f", cert.loewner_min_eig) + fmt(", |Q' - (1/2,1/2)| = %.2e", dev) +
             ", Q' " + std::string(to_string(geo.certificate.verdict));
  return o;
}

Outcome ac3() {
  Outcome o;
  double worst_std = 0.0, worst_log = -std::numeric_limits<double>::infinity();
  for (const auto& inst : geometric_instances()) {
    worst_std = std::max(worst_std, std::abs(frbl_ratio(inst.datum, standard_tuple(inst.datum)) - 1.0));
    Rng rng(kDefaultSeed);
    for (int s = 0; s < kTuples; ++s) {
      worst_log = std::max(worst_log, log_frbl_ratio(inst.datum, sample_admissible_tuple(inst.datum, rng)));
    }
  }
  const double worst = std::exp(worst_log);
  o.pass = worst_std <= kRatioOne && worst <= 1.0 + kRatioSlack;
  o.detail = fmt("standard |ratio - 1| = %.2e", worst_std) + fmt(", max random ratio = %.12f", worst);
  return o;
}

Outcome ac4() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& inst : geometric_instances()) {
    Rng rng(kDefaultSeed + 1);
    for (int s = 0; s < kTuples; ++s) {
      const auto tuple = sample_admissible_tuple(inst.datum, rng);
      for (double t : {0.1, 1.0, 10.0}) {
        worst = std::min(worst, relation_check(inst.datum, evolve_tuple(tuple, t)).form_gap_min_eig);
      }
    }
  }
  o.pass = worst >= -kFormGapTol;
  o.detail = fmt("min form-gap eigenvalue = %.3e", worst);
  return o;
}

Outcome ac5() {
  const std::vector<double> times{0.1, 0.5, 1.0};
  PreservationOptions opts;
  opts.tol = kDefectTol;
  const auto start = std::chrono::steady_clock::now();
  const auto pl_set = prekopa_leindler_gaussian_grids();
  const auto pl = verify_preservation(prekopa_leindler(0.5), pl_set.f, pl_set.g, times, opts);
  const auto y_set = young_bump_grids();
  const auto y = verify_preservation(young_frame(), y_set.f, y_set.g, times, opts);
  const double rt = seconds_since(start);
  double pl_min = std::numeric_limits<double>::infinity(), y_min = pl_min;
  for (const auto& s : pl.samples) pl_min = std::min(pl_min, s.min_defect);
  for (const auto& s : y.samples) y_min = std::min(y_min, s.min_defect);
  Outcome o;
  o.pass = pl.holds && y.holds && rt < kRuntimeGrid;
  o.detail = fmt("PL min defect = %.3e", pl_min) + fmt(", young min defect = %.3e", y_min) +
             fmt(", runtime = %.2f s", rt);
  return o;
}

Outcome ac6() {
  test::Gen gen(606);
  double worst = 0.0;
  for (Index n : {1, 2}) {
    for (double t : {0.1, 1.0, 10.0}) {
      for (int trial = 0; trial < 5; ++trial) {
        const CenteredGaussian g(test::uniform(gen, -1, 1), test::gen_pd(gen, n));
        const auto a = test::gen_pd(gen, n);
        const auto e = heat_evolve(g, t, a);
        for (int p = 0; p < 3; ++p) {
          const Vector x = 0.7 * test::normal_vector(gen, n);
          const double want = test::heat_quadrature(g.log_prefactor(), g.form().matrix(), t, a.matrix(), x);
          worst = std::max(worst, std::abs(e.value(x) - want) / want);
        }
      }
    }
  }
  return {worst <= kQuadratureRel, fmt("max relative error = %.2e", worst)};
}

Outcome ac7() {
  test::Gen gen(707);
  double worst = 0.0;
  for (Index n : {1, 2}) {
    const CenteredGaussian g(test::uniform(gen, -1, 1), test::gen_pd(gen, n));
    const auto a = test::gen_pd(gen, n);
    for (int p = 0; p < 5; ++p) {
      const Vector x = test::normal_vector(gen, n);
      const double lim = long_time_limit(g, a, x);
      worst = std::max(worst, std::abs(rescaled_heat_value(g, a, x, 1e4) - lim) / std::max(1.0, lim));
    }
  }
  return {worst <= kLongTimeTol, fmt("max deviation at t = 1e4: %.2e", worst)};
}

Outcome ac8() {
  test::Gen gen(808);
  double worst_slack = std::numeric_limits<double>::infinity();
  int failures = 0, short_instances = 0;
  for (const auto& inst : geometric_instances()) {
    const auto& d = inst.datum;
    const auto& l = d.layout();
    for (int s = 0; s < kKey1Samples; ++s) {
      std::vector<Vector> v;
      for (int j = 0; j < l.m(); ++j) v.push_back(test::normal_vector(gen, l.out_dim(j)));
      const auto r = verify_key1(d, v);
      worst_slack = std::min(worst_slack, (r.rhs - r.lhs) / std::max(1.0, r.rhs));
    }
    const auto cert = check_geometric(d);
    int accepted = 0;
    for (int trial = 0; trial < 50 * kTracePairs && accepted < kTracePairs; ++trial) {
      std::vector<SymMatrix> ys;
      Matrix inner = Matrix::Zero(l.total_out(), l.total_out());
      for (int j = 0; j < l.m(); ++j) {
        ys.push_back(test::gen_psd(gen, l.out_dim(j), l.out_dim(j)));
        inner.block(l.out_offset(j), l.out_offset(j), l.out_dim(j), l.out_dim(j)) = d.d()[j] * ys.back().matrix();
      }
      const Matrix rhs = d.q().transpose() * inner * d.q();
      const double shrink = test::uniform(gen, 0.1, 1.0);
      const double scale = 1.0 + rhs.norm();
      std::vector<SymMatrix> xs;
      for (int i = 0; i < l.k(); ++i) {
        const Matrix blk = rhs.block(l.in_offset(i), l.in_offset(i), l.in_dim(i), l.in_dim(i));
        const double tau = l.k() == 1 ? 0.0 : test::uniform(gen, 0.0, 2.0) * scale;
        xs.push_back(SymMatrix((shrink * blk - tau * Matrix::Identity(l.in_dim(i), l.in_dim(i))) / d.c()[i]));
      }
      const auto r = verify_trace_implication(d, xs, ys, *cert.sigma);
      if (r.verdict == TraceVerdict::hypothesis_not_met) continue;
      ++accepted;
      if (r.verdict != TraceVerdict::conclusion_holds) ++failures;
    }
    if (accepted < kTracePairs) ++short_instances;
  }
  Outcome o;
  o.pass = worst_slack >= -kKey1Slack && failures == 0 && short_instances == 0;
  o.detail = fmt("key1 min relative slack = %.2e", worst_slack) + ", trace conclusion failures = " +
             std::to_string(failures) + ", instances short of pairs = " + std::to_string(short_instances);
  return o;
}

Outcome ac9() {
  const auto set = young_monotone_grids();
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0, 2.0};
  const auto q = monotone_functional(young_frame(), set.g, times, *set.e0_grid);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < q.size(); ++i) worst = std::min(worst, (q[i].value - q[i - 1].value) / q[i - 1].value);
  std::string values;
  for (const auto& s : q) values += fmt(" %.7f", s.value);
  return {worst >= -kMonotoneRel, "Q(t) =" + values + fmt(", min relative step = %.2e", worst)};
}

Outcome ac10() {
  test::Gen gen(1010);
  double worst_mass = 0.0, worst_semi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(gen() % 3);
    const CenteredGaussian g(test::uniform(gen, -2, 2), test::gen_pd(gen, n));
    const auto a = test::gen_pd(gen, n);
    const double s = test::uniform(gen, 0.01, 5.0), t = test::uniform(gen, 0.01, 5.0);
    worst_mass = std::max(worst_mass, std::abs(log_gaussian_integral(heat_evolve(g, t, a)) - log_gaussian_integral(g)));
    const auto two = heat_evolve(heat_evolve(g, s, a), t, a);
    const auto one = heat_evolve(g, s + t, a);
    worst_semi = std::max({worst_semi,
                           (two.form() - one.form()).frobenius_norm() / std::max(1.0, one.form().frobenius_norm()),
                           std::abs(two.log_prefactor() - one.log_prefactor())});
  }
  return {worst_mass <= kSemigroupTol && worst_semi <= kSemigroupTol,
          fmt("max log-mass drift = %.2e", worst_mass) + fmt(", max semigroup gap = %.2e", worst_semi)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
