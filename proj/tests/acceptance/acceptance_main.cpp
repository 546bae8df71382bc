#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "vru/avoidance.hpp"
#include "vru/benefit.hpp"
#include "vru/config.hpp"
#include "vru/csv.hpp"
#include "vru/extrapolation.hpp"
#include "vru/io.hpp"
#include "vru/pipeline.hpp"
#include "vru/severity.hpp"
#include "vru/simulator.hpp"
#include "vru/special.hpp"
#include "vru_test_support.hpp"

namespace {

using namespace vru;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

const std::filesystem::path kFixtureTests =
    std::filesystem::path(VRU_FIXTURE_DIR) / "prospect_tests.csv";

AvoidanceCurve constant_curve(double p) {
  AvoidanceCurve c;
  c.form = CurveForm::kPoly2;
  c.median = c.lower = c.upper = {p, 0.0, 0.0};
  return c;
}

Outcome ac1() {
  const auto t0 = Clock::now();
  const BetaParams post = bayes_update({20.0, 11.0}, 1, 1, 2.0);
  const double dt = seconds_since(t0);
  const bool ok = post.a == 22.0 && post.b == 11.0 && dt < 1e-3;
  return {ok, fmt("Beta(%.17g, %.17g) in %.3g s", post.a, post.b, dt)};
}

Outcome ac2() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> ab(0.5, 200.0);
  double worst = 0.0, lib_seconds = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ab(gen), b = ab(gen);
    for (double q : {0.05, 0.5, 0.95}) {
      const auto t0 = Clock::now();
      const double x = beta_quantile({a, b}, q);
      lib_seconds += seconds_since(t0);
      worst = std::max(worst, std::abs(x - testing::beta_quantile_oracle(a, b, q)));
    }
  }
  return {worst <= 1e-8 && lib_seconds < 5.0,
          fmt("max |error| %.3g over 300 quantiles, %.3g s", worst, lib_seconds)};
}

Outcome ac3() {
  const CurveCoeffs c = {5.774, -0.205, 0.0};
  const double p40 = evaluate_coeffs(CurveForm::kLogistic, c, 40.0);
  const double p0 = evaluate_coeffs(CurveForm::kLogistic, c, 0.0);
  const bool ok = std::abs(p40 - 0.0811) <= 5e-4 && std::abs(p0 - 0.9969) <= 5e-4;
  return {ok, fmt("p(40) = %.7f, p(0) = %.7f", p40, p0)};
}

Outcome ac4() {
  const auto t0 = Clock::now();
  const InjuryRiskModel cyc = builtin_probit(VruType::kCyclist);
  const InjuryRiskModel ped = builtin_probit(VruType::kPedestrian);
  const bool aic_ok = cyc.aic - (-2.0 * cyc.log_lik) == 6.0 && ped.aic - (-2.0 * ped.log_lik) == 6.0;
  const double pf = injury_risk(cyc, RiskLevel::kFatal, 30.0);
  const double ps = injury_risk(cyc, RiskLevel::kSeriousOrWorse, 30.0);
  const bool p_ok = std::abs(pf - 0.00461) <= 1e-4 && std::abs(ps - 0.3413) <= 1e-3;
  int recovered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto persons = testing::sample_probit(cyc.beta, cyc.tau1, cyc.tau2, 5000,
                                                1000 + static_cast<std::uint64_t>(trial));
    const InjuryRiskModel m = fit_ordered_probit(persons);
    if (std::abs(m.beta - cyc.beta) <= 3.0 * m.se_beta &&
        std::abs(m.tau1 - cyc.tau1) <= 3.0 * m.se_tau1 &&
        std::abs(m.tau2 - cyc.tau2) <= 3.0 * m.se_tau2) {
      ++recovered;
    }
  }
  const double dt = seconds_since(t0);
  return {aic_ok && p_ok && recovered >= 95 && dt < 60.0,
          fmt("P(Fatal|30) = %.7f, P(Serious+|30) = %.7f, recovered %.0f/100", pf, ps,
              recovered) +
              fmt(" within 3 SE, %.2f s", dt) +
              (aic_ok ? ", AIC - deviance = 6 exactly" : ", AIC offset wrong")};
}

Outcome ac5() {
  const auto t0 = Clock::now();
  const SimConfig sim;
  const auto crashes = generate_synthetic_usecase(UseCase::kUC5, 50, 77, sim);
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  SpeedModel original;
  original.kind = SpeedModelKind::kOriginalSpeed;
  const BenefitEstimate full = posterior_benefit(crashes, constant_curve(1.0), original, irc,
                                                 RiskLevel::kSeriousOrWorse);
  const BenefitEstimate none = posterior_benefit(crashes, constant_curve(0.0), original, irc,
                                                 RiskLevel::kSeriousOrWorse);

  const BatchResult batch = batch_simulate(crashes, Algorithm::kA1, sim, 1);
  AvoidanceOptions opt;
  const AvoidanceModel model = build_avoidance_model(UseCase::kUC5, Algorithm::kA1, crashes,
                                                     batch.outcomes, parse_tests(kFixtureTests),
                                                     opt);
  const SpeedModel speed = fit_speed_model_or_fallback(crashes, batch.outcomes);
  const double analytic = expected_casualties(
      transformed_frequency(crashes, model.curve, speed), irc, RiskLevel::kSeriousOrWorse);
  const MonteCarloResult mc = monte_carlo_benefit(crashes, model.curve, speed, irc,
                                                  RiskLevel::kSeriousOrWorse, 100000, 5, 4);
  const double dt = seconds_since(t0);
  const double z = mc.std_err > 0.0 ? std::abs(mc.mean - analytic) / mc.std_err : 0.0;
  const bool ok = full.reduction_pct == 100.0 && none.reduction_pct == 0.0 &&
                  std::abs(mc.mean - analytic) <= 3.0 * mc.std_err && dt < 10.0;
  return {ok, fmt("full %.6g%%, null %.6g%%, ", full.reduction_pct, none.reduction_pct) +
                  fmt("MC %.6g vs %.6g (%.2f SE)", mc.mean, analytic, z) + fmt(", %.2f s", dt)};
}

Outcome ac6() {
  std::int64_t checked = 0;
  bool exact = true, ones = true;
  for (VruType type : {VruType::kCyclist, VruType::kPedestrian}) {
    const auto indepth = generate_synthetic_persons(type, 1500, 1, PersonPopulation::kInDepth);
    const auto target = generate_synthetic_persons(type, 50000, 1, PersonPopulation::kTarget);
    const Tree tree = build_tree(indepth);
    const auto in_counts = leaf_counts(tree);
    const auto tg_counts = apply_tree(tree, target);
    for (const auto& f : compute_factors(tree, in_counts, tg_counts)) {
      exact = exact && f.factor.num * f.indepth == f.target * f.factor.den &&
              f.indepth == level_count(in_counts.at(f.node), f.level) &&
              f.target == level_count(tg_counts.at(f.node), f.level);
      ++checked;
    }
    for (const auto& f : compute_factors(tree, in_counts, apply_tree(tree, indepth))) {
      ones = ones && f.factor == Rational{1, 1};
    }
  }
  return {exact && ones && checked > 0,
          std::to_string(checked) + " (level, node) factors exact; identical data gives 1: " +
              (ones ? "yes" : "no")};
}

Outcome ac7() {
  const DeploymentParams d{0.2, 0.82};
  const double f = d.factor();
  const double s = scale_benefit(693.0, d);
  return {f == 0.164 && std::abs(s - 113.652) <= 1e-9,
          fmt("factor %.17g, 693 x factor = %.12g", f, s)};
}

Outcome ac8() {
  RunConfig c;
  c.tests = kFixtureTests;
  for (const auto& t : parse_tests(kFixtureTests)) {
    if (!t.avoided) return {false, "fixture contains a non-avoided test"};
  }
  const PreparedData d = prepare(c, generate_crashes(c), parse_tests(kFixtureTests), {}, 0);
  std::vector<VariantResult> results;
  for (double w : {0.0, 1.0, 2.0, 10.0}) {
    Variant v = primary_variant(c);
    v.w = w;
    results.push_back(run_variant(d, c, v));
  }
  int compared = 0;
  bool ok = true;
  std::string first_violation;
  for (std::size_t i = 1; i < results.size(); ++i) {
    for (std::size_t k = 0; k < results[i].benefits.size(); ++k) {
      const auto& cur = results[i].benefits[k];
      const auto& prev = results[i - 1].benefits[k];
      if (cur.group.rfind("Total", 0) != 0) continue;
      ++compared;
      if (cur.reduction_pct < prev.reduction_pct) {
        ok = false;
        if (first_violation.empty()) {
          first_violation = " first violation " + cur.group + "/" +
                            std::string(to_string(cur.algorithm)) + "/" +
                            std::string(to_string(cur.level));
        }
      }
    }
  }
  std::string trend;
  for (const auto& r : results) {
    for (const auto& b : r.benefits) {
      if (b.group == kTotalGroup && b.algorithm == Algorithm::kA1 &&
          b.level == RiskLevel::kFatal) {
        trend += (trend.empty() ? "" : " <= ") + format_number(b.reduction_pct);
      }
    }
  }
  return {ok && compared > 0,
          std::to_string(compared) + " total rows nondecreasing in w; Total/A1/Fatal " + trend +
              first_violation};
}

Outcome ac9() {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> counts(0, 300), tests(0, 12);
  const std::array<double, 7> weights = {0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
  std::uniform_int_distribution<std::size_t> wi(0, weights.size() - 1);
  int exact = 0;
  for (int i = 0; i < 1000; ++i) {
    int avoided = counts(gen), not_avoided = counts(gen);
    if (avoided + not_avoided == 0) avoided = 1;
    const BetaParams prior = prior_from_counts(avoided, not_avoided);
    const int n = tests(gen);
    const int s = std::uniform_int_distribution<int>(0, n)(gen);
    const double w = weights[wi(gen)];
    const FrequentistEstimate f = frequentist_estimate(prior, n, s, w);
    const double mean = beta_mean(bayes_update(prior, n, s, w));
    const double rational = (prior.a + w * s) / (prior.a + prior.b + w * n);
    if (f.p_hat == mean && f.p_hat == rational) ++exact;
  }
  return {exact == 1000, std::to_string(exact) + "/1000 configurations bit-identical"};
}

Outcome ac10() {
  const SimConfig sim;
  const double d = simulated_stopping_distance(kmh_to_ms(50.0), 9.0, sim.dt);
  const double tol = kmh_to_ms(50.0) * sim.dt;
  RunConfig c;
  const auto crashes = generate_crashes(c);
  double worst = 0.0;
  int collided = 0;
  for (const auto& crash : crashes) {
    const Rollout r = simulate(crash, nullptr, sim);
    if (r.collided) ++collided;
    worst = std::max(worst, std::abs(ms_to_kmh(r.collision_speed_ms) -
                                     crash.orig_collision_speed_kmh));
  }
  const bool ok = std::abs(d - 10.717) <= tol && collided == static_cast<int>(crashes.size()) &&
                  worst <= 1.0;
  return {ok, fmt("stopping distance %.6f m (tolerance %.4f m); ", d, tol) +
                  std::to_string(collided) + "/" + std::to_string(crashes.size()) +
                  fmt(" replays collide, max speed error %.4g km/h", worst)};
}

std::vector<std::string> assess_files() {
  return {"outcomes.csv",     "sim_summary.csv", "speed_bins.csv", "avoidance_models.csv",
          "speed_models.csv", "irc_models.csv",  "benefit.csv"};
}

Outcome ac11() {
  testing::TempDir base("acceptance_e2e");
  RunConfig c;
  c.tests = kFixtureTests;
  c.out_dir = base / "gen";
  cmd_generate(c);
  int total = 0;
  for (const auto& [uc, n] : c.crash_counts) total += n;

  double worst_time = 0.0;
  std::vector<std::string> reference;
  bool identical = true;
  std::string mismatch;
  const std::array<int, 3> worker_runs = {1, 8, 8};
  for (std::size_t run = 0; run < worker_runs.size(); ++run) {
    RunConfig rc = c;
    rc.out_dir = base / ("run" + std::to_string(run));
    rc.crashes = c.crashes_path();
    rc.persons_indepth = c.persons_indepth_path();
    const auto t0 = Clock::now();
    cmd_assess(rc, worker_runs[run]);
    worst_time = std::max(worst_time, seconds_since(t0));
    std::vector<std::string> contents;
    for (const auto& f : assess_files()) contents.push_back(read_file(rc.output(f)));
    if (run == 0) {
      reference = contents;
    } else {
      for (std::size_t i = 0; i < contents.size(); ++i) {
        if (contents[i] != reference[i]) {
          identical = false;
          if (mismatch.empty()) mismatch = " differs: " + assess_files()[i];
        }
      }
    }
  }
  return {identical && worst_time < 60.0 && total == 1943,
          std::to_string(total) + " crashes, 4 algorithms, slowest run " +
              fmt("%.2f s", worst_time) + ", outputs bit-identical across runs and workers {1, 8}" +
              (identical ? "" : ": no" + mismatch)};
}

Outcome ac12() {
  testing::TempDir base("acceptance_sens");
  RunConfig c;
  c.tests = kFixtureTests;
  c.out_dir = base.path();
  cmd_generate(c);
  cmd_assess(c, 0);
  cmd_sensitivity(c, 0);
  const CsvDocument benefit = read_csv(c.output("benefit.csv"));
  const CsvDocument sens = read_csv(c.output("sensitivity.csv"));
  const std::string ref = primary_variant(c).name();
  std::size_t col = 0;
  for (std::size_t i = 0; i < sens.header.size(); ++i) {
    if (sens.header[i] == ref) col = i;
  }
  if (col == 0) return {false, "reference column " + ref + " missing"};
  const std::string alg(to_string(c.sensitivity_algorithm));
  int matched = 0, compared = 0;
  for (const auto& srow : sens.rows) {
    for (const auto& brow : benefit.rows) {
      if (brow[0] != srow[1] || brow[1] != alg || brow[2] != srow[0]) continue;
      ++compared;
      if (brow[5] == srow[col] && brow[6] == srow[col + 1] && brow[7] == srow[col + 2]) ++matched;
    }
  }
  return {compared > 0 && matched == compared && compared == static_cast<int>(sens.rows.size()),
          std::to_string(matched) + "/" + std::to_string(compared) + " reference cells (" + ref +
              ", " + alg + ") identical to assess benefit.csv"};
}

}  // namespace

int main() {
  report("AC1", ac1);
  report("AC2", ac2);
  report("AC3", ac3);
  report("AC4", ac4);
  report("AC5", ac5);
  report("AC6", ac6);
  report("AC7", ac7);
  report("AC8", ac8);
  report("AC9", ac9);
  report("AC10", ac10);
  report("AC11", ac11);
  report("AC12", ac12);
  std::printf("%d of 12 criteria met\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
