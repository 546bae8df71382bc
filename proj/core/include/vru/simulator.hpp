#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vru/csv.hpp"
#include "vru/domain.hpp"

namespace vru {

struct SimConfig {
  double dt = 0.005;                    // s
  double comfort_decel = 4.0;           // m/s^2
  double emergency_decel = 9.0;         // m/s^2
  double comfort_ttc_on = 1.5;          // s
  double comfort_ttc_off = 0.5;         // s
  double emergency_ttc = 0.5;           // s, A1 trigger
  double car_lat_accel_max = 5.0;       // m/s^2
  double vru_lat_accel_max = 1.5;       // m/s^2
  double detection_range = 80.0;        // m
  double obstruction_reveal_dist = 10.0;  // m from the conflict point
  double car_half_width = 0.9;          // m
  double vru_half_width = 0.35;         // m

  // Throws ConfigError on violated invariants.
  void validate() const;
  double corridor_half_width() const noexcept { return car_half_width + vru_half_width; }

  bool operator==(const SimConfig&) const = default;
};

// Flat key=value text; '#' starts a comment. Unknown keys are ConfigErrors.
SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string to_text(const SimConfig& config);
// Applies a single key=value pair; returns false when `key` is not a SimConfig key.
bool set_sim_config_value(SimConfig& config, std::string_view key,
                          std::string_view value);

enum class Algorithm { kA1, kA2, kA3, kA4 };
enum class Intervention { kNone, kComfortBrake, kEmergencyBrake, kSteer, kSteerThenBrake };

template <>
struct EnumNames<Algorithm> {
  static constexpr std::array names = {std::string_view("A1"), std::string_view("A2"),
                                       std::string_view("A3"), std::string_view("A4")};
};
template <>
struct EnumNames<Intervention> {
  static constexpr std::array names = {
      std::string_view("None"), std::string_view("ComfortBrake"),
      std::string_view("EmergencyBrake"), std::string_view("Steer"),
      std::string_view("SteerThenBrake")};
};

bool applicable(Algorithm algorithm, UseCase uc) noexcept;
AlgorithmFamily family_of(Algorithm algorithm) noexcept;

struct SimOutcome {
  std::string crash_id;
  Algorithm algorithm = Algorithm::kA1;
  bool avoided = false;
  double collision_speed_kmh = 0.0;  // 0 if avoided
  double speed_reduction_kmh = 0.0;
  Intervention intervention = Intervention::kNone;

  bool operator==(const SimOutcome&) const = default;
};

// Point-in-time kinematics. Car coordinates: x along its path, y lateral.
// Crossing/Turning: the conflict point is fixed at conflict_x and the VRU moves
// along y. Longitudinal: conflict_x is the VRU's rear, moving along x.
struct KinematicState {
  GeometryClass geometry = GeometryClass::kCrossing;
  double car_x = 0.0;
  double car_speed = 0.0;  // m/s
  double car_y = 0.0;
  double car_vy = 0.0;
  double conflict_x = 0.0;
  double vru_y = 0.0;
  double vru_speed = 0.0;  // m/s
  double vru_dir = -1.0;   // crossing only: sign of VRU lateral motion
};

KinematicState initial_state(const CrashRecord& crash);

// Time for the car to reach the conflict (Crossing/Turning) or close the gap
// (Longitudinal) under constant behaviour; +infinity when no collision is
// predicted.
double ttc(const KinematicState& state, const SimConfig& config) noexcept;

// VRU minus car lateral position at `t` seconds ahead, constant behaviour.
double predicted_offset(const KinematicState& state, double t) noexcept;

enum class EvadingActor { kCar, kVru, kBoth };

// True iff covering `clearance` metres takes longer than `t` at `lat_accel`.
bool clearance_unreachable(double clearance, double lat_accel, double t) noexcept;

// Lateral-offset criterion: the clearance still needed at the predicted
// impact exceeds 0.5 * a_lat * t^2. kBoth pools both actors' capability.
bool unavoidable_by_steering(const KinematicState& state, EvadingActor actor,
                             const SimConfig& config) noexcept;

bool unavoidable_by_braking(const KinematicState& state, const SimConfig& config) noexcept;

struct Rollout {
  bool collided = false;
  double collision_speed_ms = 0.0;
  double braked_distance_m = 0.0;           // distance travelled while decelerating
  double stop_distance_m = 0.0;             // car travel until rest (if it stopped)
  bool stopped = false;
  double ttc_at_detection = 0.0;            // +inf if never detected
  Intervention intervention = Intervention::kNone;
  double time_s = 0.0;
};

// Full rollout of one crash; `algorithm == nullptr` replays without any
// intervention.
Rollout simulate(const CrashRecord& crash, const Algorithm* algorithm,
                 const SimConfig& config);

SimOutcome run_counterfactual(const CrashRecord& crash, Algorithm algorithm,
                              const SimConfig& config);

// Distance covered by the integrator braking from `speed_ms` to rest.
double simulated_stopping_distance(double speed_ms, double decel, double dt);

struct UseCaseSummary {
  UseCase use_case = UseCase::kUC1;
  int total = 0;
  int avoided = 0;
  int mitigated = 0;
  int unchanged = 0;
  double pct_avoided() const noexcept { return total ? 100.0 * avoided / total : 0.0; }
  double pct_mitigated() const noexcept { return total ? 100.0 * mitigated / total : 0.0; }
  double pct_unchanged() const noexcept { return total ? 100.0 * unchanged / total : 0.0; }
};

struct BatchResult {
  std::vector<SimOutcome> outcomes;  // input order
  std::vector<UseCaseSummary> summary;  // use-case order
};

// Avoided / mitigated / unchanged counts per use case, in use-case order.
std::vector<UseCaseSummary> summarize_outcomes(const std::vector<CrashRecord>& crashes,
                                               const std::vector<SimOutcome>& outcomes);

// Worker count from VRU_BENEFIT_WORKERS (default: hardware concurrency).
int default_workers();

BatchResult batch_simulate(const std::vector<CrashRecord>& crashes,
                           Algorithm algorithm, const SimConfig& config,
                           int workers = 0);

inline constexpr std::string_view kOutcomesHeader =
    "crash_id,algorithm,avoided,collision_speed_kmh,speed_reduction_kmh,intervention";

Table outcomes_table(const std::vector<SimOutcome>& outcomes);
Table summary_table(Algorithm algorithm, const std::vector<UseCaseSummary>& summary);
std::vector<SimOutcome> parse_outcomes_text(std::string_view csv);
std::vector<SimOutcome> parse_outcomes(const std::filesystem::path& path);

// Synthetic stand-in for the in-depth pre-crash database.
std::vector<CrashRecord> generate_synthetic_usecase(UseCase uc, int count,
                                                    std::uint64_t seed,
                                                    const SimConfig& config = {});

}  // namespace vru
