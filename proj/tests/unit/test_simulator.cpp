#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "vru/error.hpp"
#include "vru/simulator.hpp"
#include "vru_test_support.hpp"

namespace vru {
namespace {

using testing::make_crash;

KinematicState longitudinal_state(double gap, double car_ms, double vru_ms) {
  KinematicState s;
  s.geometry = GeometryClass::kLongitudinal;
  s.conflict_x = gap;
  s.car_speed = car_ms;
  s.vru_speed = vru_ms;
  return s;
}

TEST(Ttc, Examples) {
  const SimConfig cfg;
  KinematicState cross;
  cross.geometry = GeometryClass::kCrossing;
  cross.conflict_x = 20.0;
  cross.car_speed = 10.0;
  EXPECT_DOUBLE_EQ(ttc(cross, cfg), 2.0);
  EXPECT_DOUBLE_EQ(ttc(longitudinal_state(15.0, 12.0, 4.0), cfg), 1.875);
  EXPECT_TRUE(std::isinf(ttc(longitudinal_state(15.0, 4.0, 6.0), cfg)));
  cross.vru_y = 5.0;
  cross.vru_speed = 0.0;
  EXPECT_TRUE(std::isinf(ttc(cross, cfg)));
}

TEST(Steering, ClearanceCriterion) {
  EXPECT_TRUE(clearance_unreachable(1.25, 5.0, 0.5));
  EXPECT_FALSE(clearance_unreachable(1.25, 5.0, 1.0));
  EXPECT_FALSE(clearance_unreachable(0.0, 5.0, 0.01));
  EXPECT_FALSE(clearance_unreachable(-0.2, 5.0, 0.01));
}

TEST(Steering, PooledCapabilityIsWeaker) {
  const SimConfig cfg;
  KinematicState s;
  s.geometry = GeometryClass::kCrossing;
  s.conflict_x = 7.0;
  s.car_speed = 10.0;
  // t = 0.7 s, clearance 1.25 m: car alone 1.225 m, pooled 1.59 m.
  EXPECT_TRUE(unavoidable_by_steering(s, EvadingActor::kCar, cfg));
  EXPECT_FALSE(unavoidable_by_steering(s, EvadingActor::kBoth, cfg));
  EXPECT_TRUE(unavoidable_by_steering(s, EvadingActor::kVru, cfg));
}

TEST(Braking, StoppingDistanceMatchesClosedForm) {
  const double v = kmh_to_ms(50.0);
  const double expected = v * v / (2.0 * 9.0);
  EXPECT_NEAR(expected, 10.717, 5e-4);
  for (double dt : {0.001, 0.005, 0.01}) {
    EXPECT_NEAR(simulated_stopping_distance(v, 9.0, dt), expected, 1e-9) << dt;
  }
}

TEST(Rollout, ReplayKeepsInitialSpeed) {
  const SimConfig cfg;
  const auto crash = make_crash("s", UseCase::kUC5, 40.0, 0.0, 25.0, 0.0, 40.0);
  const Rollout r = simulate(crash, nullptr, cfg);
  ASSERT_TRUE(r.collided);
  EXPECT_NEAR(ms_to_kmh(r.collision_speed_ms), 40.0, 1e-9);
  EXPECT_NEAR(r.time_s, 25.0 / kmh_to_ms(40.0), 1e-9);
}

TEST(Rollout, EmergencyBrakeMatchesClosedForm) {
  SimConfig cfg;
  cfg.comfort_ttc_off = 0.5;
  cfg.comfort_ttc_on = 0.5 + 1e-9;  // no comfort phase
  for (double kmh : {30.0, 50.0, 70.0}) {
    const auto crash = make_crash("s", UseCase::kUC5, kmh, 0.0, 40.0, 0.0, kmh);
    const double v0 = kmh_to_ms(kmh);
    const double trigger_gap = v0 * cfg.emergency_ttc;
    const double v2 = v0 * v0 - 2.0 * cfg.emergency_decel * trigger_gap;
    const double expected = v2 > 0.0 ? ms_to_kmh(std::sqrt(v2)) : 0.0;
    const SimOutcome o = run_counterfactual(crash, Algorithm::kA1, cfg);
    if (expected == 0.0) {
      EXPECT_TRUE(o.avoided) << kmh;
    } else {
      ASSERT_FALSE(o.avoided) << kmh;
      EXPECT_NEAR(o.collision_speed_kmh, expected, 1.0) << kmh;
      EXPECT_EQ(o.intervention, Intervention::kEmergencyBrake);
    }
  }
}

TEST(Rollout, GeneratedCrashesReplayToRecordedSpeed) {
  const SimConfig cfg;
  for (UseCase uc : all_values<UseCase>()) {
    for (const auto& c : generate_synthetic_usecase(uc, 20, 3, cfg)) {
      const Rollout r = simulate(c, nullptr, cfg);
      ASSERT_TRUE(r.collided) << c.id;
      EXPECT_NEAR(ms_to_kmh(r.collision_speed_ms), c.orig_collision_speed_kmh, 1.0) << c.id;
    }
  }
}

TEST(Counterfactual, NeverFasterThanOriginalAndEnergyBounded) {
  const SimConfig cfg;
  for (UseCase uc : all_values<UseCase>()) {
    const auto crashes = generate_synthetic_usecase(uc, 40, 11, cfg);
    for (Algorithm a : all_values<Algorithm>()) {
      if (!applicable(a, uc)) continue;
      for (const auto& c : crashes) {
        const SimOutcome o = run_counterfactual(c, a, cfg);
        EXPECT_LE(o.collision_speed_kmh, c.car_speed_init_kmh);
        EXPECT_LE(o.collision_speed_kmh, c.orig_collision_speed_kmh + 1e-9) << c.id;
        EXPECT_NEAR(o.speed_reduction_kmh, c.car_speed_init_kmh - o.collision_speed_kmh, 1e-9);
        if (o.avoided) {
          EXPECT_EQ(o.collision_speed_kmh, 0.0);
        } else if (!is_longitudinal(uc)) {
          const double v0 = kmh_to_ms(c.car_speed_init_kmh);
          const double v1 = kmh_to_ms(o.collision_speed_kmh);
          EXPECT_LE(v0 * v0 - v1 * v1, 2.0 * cfg.emergency_decel * c.long_dist_m + 1e-2)
              << c.id;
        }
      }
    }
  }
}

TEST(Counterfactual, A4RejectsNonLongitudinal) {
  const auto crash = make_crash("x", UseCase::kUC1, 40.0, 5.0, 20.0, 3.0, 40.0);
  try {
    run_counterfactual(crash, Algorithm::kA4, SimConfig{});
    FAIL() << "expected GeometryError";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("A4"), std::string::npos);
  }
}

TEST(Batch, DeterministicAcrossWorkerCounts) {
  const SimConfig cfg;
  std::vector<CrashRecord> crashes = generate_synthetic_usecase(UseCase::kUC1, 150, 5, cfg);
  const auto more = generate_synthetic_usecase(UseCase::kUC9, 150, 5, cfg);
  crashes.insert(crashes.end(), more.begin(), more.end());
  const BatchResult one = batch_simulate(crashes, Algorithm::kA2, cfg, 1);
  const BatchResult eight = batch_simulate(crashes, Algorithm::kA2, cfg, 8);
  EXPECT_EQ(one.outcomes, eight.outcomes);
  EXPECT_EQ(to_csv(outcomes_table(one.outcomes)), to_csv(outcomes_table(eight.outcomes)));
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    EXPECT_EQ(one.outcomes[i].crash_id, crashes[i].id);
  }
}

TEST(Batch, SummaryPartitionsEachUseCase) {
  const SimConfig cfg;
  std::vector<CrashRecord> crashes;
  for (UseCase uc : {UseCase::kUC2, UseCase::kUC4, UseCase::kUC12}) {
    const auto part = generate_synthetic_usecase(uc, 60, 8, cfg);
    crashes.insert(crashes.end(), part.begin(), part.end());
  }
  const BatchResult r = batch_simulate(crashes, Algorithm::kA1, cfg, 2);
  ASSERT_EQ(r.summary.size(), 3u);
  for (const auto& row : r.summary) {
    EXPECT_EQ(row.total, 60);
    EXPECT_EQ(row.avoided + row.mitigated + row.unchanged, row.total);
    EXPECT_NEAR(row.pct_avoided() + row.pct_mitigated() + row.pct_unchanged(), 100.0, 1e-9);
  }
}

TEST(Batch, OutcomesRoundTripThroughCsv) {
  const SimConfig cfg;
  const auto crashes = generate_synthetic_usecase(UseCase::kUC10, 50, 2, cfg);
  const BatchResult r = batch_simulate(crashes, Algorithm::kA3, cfg, 3);
  EXPECT_EQ(parse_outcomes_text(to_csv(outcomes_table(r.outcomes))), r.outcomes);
}

TEST(SimConfigText, UnknownKeyAndInvariants) {
  EXPECT_THROW(parse_sim_config("dt=0.01\nbogus=3\n"), ConfigError);
  EXPECT_THROW(parse_sim_config("comfort_ttc_on=0.4\n"), ConfigError);
  const SimConfig c = parse_sim_config("# comment\ndt = 0.01\nemergency_decel=8\n");
  EXPECT_EQ(c.dt, 0.01);
  EXPECT_EQ(c.emergency_decel, 8.0);
  EXPECT_EQ(parse_sim_config(to_text(c)), c);
}

TEST(Generator, CountZeroAndDeterminism) {
  EXPECT_TRUE(generate_synthetic_usecase(UseCase::kUC3, 0, 1).empty());
  EXPECT_THROW(generate_synthetic_usecase(UseCase::kUC3, -1, 1), ValueError);
  const auto a = generate_synthetic_usecase(UseCase::kUC11, 30, 99);
  const auto b = generate_synthetic_usecase(UseCase::kUC11, 30, 99);
  const auto c = generate_synthetic_usecase(UseCase::kUC11, 30, 100);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto prefix = generate_synthetic_usecase(UseCase::kUC11, 10, 99);
  EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), a.begin()));
}

}  // namespace
}  // namespace vru
