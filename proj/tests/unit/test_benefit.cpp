#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vru/benefit.hpp"
#include "vru/error.hpp"
#include "vru_test_support.hpp"

namespace vru {
namespace {

AvoidanceCurve constant_curve(double p, double lo = -1.0, double hi = -1.0) {
  AvoidanceCurve c;
  c.form = CurveForm::kPoly2;
  c.median = {p, 0.0, 0.0};
  c.lower = {lo < 0.0 ? p : lo, 0.0, 0.0};
  c.upper = {hi < 0.0 ? p : hi, 0.0, 0.0};
  return c;
}

SpeedModel constant_speed(double v, double sd = 0.0, int n = 100) {
  SpeedModel m;
  m.kind = SpeedModelKind::kRegression;
  m.coefficients = {v};
  m.residual_std = sd;
  m.n_obs = n;
  return m;
}

SpeedModel original_speed() {
  SpeedModel m;
  m.kind = SpeedModelKind::kOriginalSpeed;
  return m;
}

CrashRecord crash_at(const std::string& id, double orig, double init = 60.0) {
  return testing::make_crash(id, UseCase::kUC5, init, 15, 20, 4, orig);
}

std::vector<CrashRecord> random_crashes(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> speed(10, 60);
  std::vector<CrashRecord> out;
  for (int i = 0; i < n; ++i) {
    const double v = speed(gen);
    out.push_back(crash_at("r" + std::to_string(i), v, v));
  }
  return out;
}

TEST(Frequency, OriginalHistogram) {
  const std::vector<CrashRecord> crashes = {crash_at("a", 20), crash_at("b", 20.4),
                                            crash_at("c", 35)};
  const FrequencyFunction f = original_frequency(crashes);
  EXPECT_EQ(f.at(20), 2.0);
  EXPECT_EQ(f.at(35), 1.0);
  EXPECT_EQ(f.at(21), 0.0);
  EXPECT_EQ(f.mass(), 3.0);
  EXPECT_EQ(f.max_speed(), 35);
  EXPECT_EQ(FrequencyFunction{}.max_speed(), 0);
}

TEST(Frequency, TransformedSingleCrash) {
  const std::vector<CrashRecord> crashes = {crash_at("a", 30)};
  const FrequencyFunction f = transformed_frequency(crashes, constant_curve(0.3),
                                                    constant_speed(18.0));
  EXPECT_NEAR(f.at(18), 0.7, 1e-15);
  EXPECT_NEAR(f.mass(), 0.7, 1e-15);
}

TEST(Frequency, FullAndNullSystems) {
  const auto crashes = random_crashes(40, 2);
  const FrequencyFunction full =
      transformed_frequency(crashes, constant_curve(1.0), constant_speed(10.0));
  EXPECT_EQ(full.mass(), 0.0);
  const FrequencyFunction null =
      transformed_frequency(crashes, constant_curve(0.0), original_speed());
  EXPECT_EQ(null.counts, original_frequency(crashes).counts);
}

TEST(ExpectedCasualties, WorkedExample) {
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  const FrequencyFunction f = original_frequency(
      {crash_at("a", 20), crash_at("b", 20), crash_at("c", 35)});
  const double r20 = 1.0 - testing::phi_upper(0.03197 * 20 - 3.5633);
  const double r35 = 1.0 - testing::phi_upper(0.03197 * 35 - 3.5633);
  const double e = expected_casualties(f, irc, RiskLevel::kFatal);
  EXPECT_NEAR(e, 2 * r20 + r35, 1e-15);
  EXPECT_NEAR(e, 0.0107124, 5e-7);
}

TEST(PosteriorBenefit, FullAndNullReduction) {
  const auto crashes = random_crashes(50, 3);
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  for (RiskLevel level : {RiskLevel::kFatal, RiskLevel::kSeriousOrWorse}) {
    const BenefitEstimate full =
        posterior_benefit(crashes, constant_curve(1.0), constant_speed(20.0), irc, level);
    EXPECT_EQ(full.e_new, 0.0);
    EXPECT_DOUBLE_EQ(full.reduction_pct, 100.0);
    const BenefitEstimate none =
        posterior_benefit(crashes, constant_curve(0.0), original_speed(), irc, level);
    EXPECT_EQ(none.e_new, none.e_orig);
    EXPECT_EQ(none.reduction_pct, 0.0);
  }
}

TEST(PosteriorBenefit, BoundsBracketEstimate) {
  const auto crashes = random_crashes(60, 4);
  const InjuryRiskModel irc = builtin_probit(VruType::kPedestrian);
  const BenefitEstimate e = posterior_benefit(crashes, constant_curve(0.4, 0.25, 0.6),
                                              constant_speed(25.0, 4.0, 60), irc,
                                              RiskLevel::kSeriousOrWorse);
  EXPECT_LE(e.low90, e.reduction_pct);
  EXPECT_GE(e.high90, e.reduction_pct);
  EXPECT_LT(e.low90, e.high90);
  EXPECT_EQ(e.group, "UC5");
}

TEST(AggregateBenefit, SumsCountsBeforePercentages) {
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  const auto a = random_crashes(30, 5);
  const auto b = random_crashes(45, 6);
  const BenefitEstimate ea =
      posterior_benefit(a, constant_curve(0.5), constant_speed(15.0), irc, RiskLevel::kFatal);
  const BenefitEstimate eb =
      posterior_benefit(b, constant_curve(0.2), constant_speed(25.0), irc, RiskLevel::kFatal);
  const BenefitEstimate total = aggregate_benefit("Total", {ea, eb});
  EXPECT_NEAR(total.e_orig, ea.e_orig + eb.e_orig, 1e-15);
  EXPECT_NEAR(total.e_new, ea.e_new + eb.e_new, 1e-15);
  EXPECT_NEAR(total.reduction_pct, 100.0 * (1.0 - total.e_new / total.e_orig), 1e-12);
  EXPECT_THROW(aggregate_benefit("Empty", {}), ZeroBaselineError);
}

TEST(PerCrashReduction, SumsToExpectedCountDifference) {
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  const auto crashes = random_crashes(80, 7);
  const AvoidanceCurve curve = constant_curve(0.35, 0.2, 0.5);
  const SpeedModel model = constant_speed(22.0, 3.0, 80);
  for (FrequencyVariant v :
       {FrequencyVariant::kPoint, FrequencyVariant::kPessimistic, FrequencyVariant::kOptimistic}) {
    double sum = 0.0;
    for (double r : per_crash_reduction(crashes, curve, model, irc, RiskLevel::kFatal, v)) sum += r;
    const double expected =
        expected_casualties(original_frequency(crashes), irc, RiskLevel::kFatal) -
        expected_casualties(transformed_frequency(crashes, curve, model, v), irc,
                            RiskLevel::kFatal);
    EXPECT_NEAR(sum, expected, 1e-13);
  }
}

TEST(MonteCarlo, DegenerateSystemsAreExact) {
  const InjuryRiskModel irc = builtin_probit(VruType::kCyclist);
  const auto crashes = random_crashes(20, 8);
  const MonteCarloResult full = monte_carlo_benefit(crashes, constant_curve(1.0),
                                                    constant_speed(20.0), irc,
                                                    RiskLevel::kFatal, 2000, 1);
  EXPECT_EQ(full.mean, 0.0);
  EXPECT_EQ(full.std_err, 0.0);
  const MonteCarloResult none = monte_carlo_benefit(crashes, constant_curve(0.0),
                                                    original_speed(), irc, RiskLevel::kFatal,
                                                    2000, 1);
  EXPECT_NEAR(none.mean, expected_casualties(original_frequency(crashes), irc, RiskLevel::kFatal),
              1e-15);
  EXPECT_THROW(monte_carlo_benefit(crashes, constant_curve(0.5), original_speed(), irc,
                                   RiskLevel::kFatal, 0, 1),
               ConfigError);
}

TEST(MonteCarlo, AgreesWithAnalyticAndIgnoresWorkers) {
  const InjuryRiskModel irc = builtin_probit(VruType::kPedestrian);
  const auto crashes = random_crashes(50, 9);
  const AvoidanceCurve curve = constant_curve(0.45);
  const SpeedModel model = constant_speed(30.0);
  const double analytic = expected_casualties(
      transformed_frequency(crashes, curve, model), irc, RiskLevel::kSeriousOrWorse);
  const MonteCarloResult one =
      monte_carlo_benefit(crashes, curve, model, irc, RiskLevel::kSeriousOrWorse, 20000, 42, 1);
  const MonteCarloResult four =
      monte_carlo_benefit(crashes, curve, model, irc, RiskLevel::kSeriousOrWorse, 20000, 42, 4);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_err, four.std_err);
  EXPECT_GT(one.std_err, 0.0);
  EXPECT_LE(std::abs(one.mean - analytic), 3.0 * one.std_err);
}

TEST(Deployment, ScaleFactor) {
  const DeploymentParams d;
  EXPECT_DOUBLE_EQ(d.factor(), 0.164);
  EXPECT_NEAR(scale_benefit(693.0, d), 113.652, 1e-9);
  EXPECT_NEAR(scale_benefit(2.0 * 693.0, d), 2.0 * scale_benefit(693.0, d), 1e-12);
  EXPECT_THROW(scale_benefit(1.0, DeploymentParams{0.0, 0.82}), ConfigError);
  EXPECT_THROW(scale_benefit(1.0, DeploymentParams{0.2, 1.5}), ConfigError);
}

TEST(BenefitTable, Columns) {
  BenefitEstimate e;
  e.group = "Total";
  e.e_orig = 2.0;
  e.e_new = 1.0;
  finalize_percentages(e);
  EXPECT_EQ(e.reduction_pct, 50.0);
  const std::string csv = to_csv(benefit_table({e}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "use_case,algorithm,level,e_orig,e_new,reduction_pct,low90,high90");
}

}  // namespace
}  // namespace vru
