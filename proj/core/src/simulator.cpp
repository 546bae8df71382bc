#include "vru/simulator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "vru/error.hpp"
#include "vru/io.hpp"

namespace vru {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxSimTime = 300.0;

struct ConfigKey {
  std::string_view name;
  double SimConfig::*member;
};

constexpr std::array kSimKeys = {
    ConfigKey{"dt", &SimConfig::dt},
    ConfigKey{"comfort_decel", &SimConfig::comfort_decel},
    ConfigKey{"emergency_decel", &SimConfig::emergency_decel},
    ConfigKey{"comfort_ttc_on", &SimConfig::comfort_ttc_on},
    ConfigKey{"comfort_ttc_off", &SimConfig::comfort_ttc_off},
    ConfigKey{"emergency_ttc", &SimConfig::emergency_ttc},
    ConfigKey{"car_lat_accel_max", &SimConfig::car_lat_accel_max},
    ConfigKey{"vru_lat_accel_max", &SimConfig::vru_lat_accel_max},
    ConfigKey{"detection_range", &SimConfig::detection_range},
    ConfigKey{"obstruction_reveal_dist", &SimConfig::obstruction_reveal_dist},
    ConfigKey{"car_half_width", &SimConfig::car_half_width},
    ConfigKey{"vru_half_width", &SimConfig::vru_half_width},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_crossing_like(GeometryClass g) { return g != GeometryClass::kLongitudinal; }

// Quantizes reported speeds to 1e-3 km/h so outcome files round-trip exactly.
double quantize(double kmh) { return std::round(kmh * 1000.0) / 1000.0; }

struct SpeedStep {
  double distance;
  double end_speed;
};

// Exact constant-deceleration kinematics over one step, stopping at rest.
SpeedStep advance_speed(double v0, double decel, double dt) {
  if (decel > 0.0 && v0 <= decel * dt) {
    return {0.5 * v0 * v0 / decel, 0.0};
  }
  return {v0 * dt - 0.5 * decel * dt * dt, v0 - decel * dt};
}

bool vru_visible(const KinematicState& s, SightObstruction sight,
                 const SimConfig& cfg) {
  const double dx = s.conflict_x - s.car_x;
  const double lat = s.vru_y - s.car_y;
  if (std::hypot(dx, lat) > cfg.detection_range) return false;
  if (sight == SightObstruction::kNotPermanent || sight == SightObstruction::kPermanent) {
    const double to_conflict = is_crossing_like(s.geometry) ? std::abs(s.vru_y) : dx;
    return to_conflict <= cfg.obstruction_reveal_dist;
  }
  return true;
}

Intervention classify(bool comfort, bool emergency, bool steered) {
  if (steered && emergency) return Intervention::kSteerThenBrake;
  if (steered) return Intervention::kSteer;
  if (emergency) return Intervention::kEmergencyBrake;
  if (comfort) return Intervention::kComfortBrake;
  return Intervention::kNone;
}

}  // namespace

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("SimConfig: ") + what);
  };
  require(dt > 0.0, "dt must be > 0");
  require(comfort_decel > 0.0 && emergency_decel > 0.0, "decelerations must be > 0");
  require(comfort_ttc_on > comfort_ttc_off && comfort_ttc_off > 0.0,
          "comfort_ttc_on > comfort_ttc_off > 0 required");
  require(emergency_ttc > 0.0, "emergency_ttc must be > 0");
  require(car_lat_accel_max > 0.0 && vru_lat_accel_max >= 0.0,
          "lateral accelerations must be positive");
  require(detection_range > 0.0 && obstruction_reveal_dist >= 0.0,
          "detection distances must be positive");
  require(car_half_width > 0.0 && vru_half_width > 0.0, "half widths must be > 0");
}

bool set_sim_config_value(SimConfig& config, std::string_view key,
                          std::string_view value) {
  for (const auto& k : kSimKeys) {
    if (k.name != key) continue;
    double v = 0.0;
    value = trim(value);
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
      throw ConfigError("SimConfig: bad number for " + std::string(key) + ": '" +
                        std::string(value) + "'");
    }
    config.*(k.member) = v;
    return true;
  }
  return false;
}

SimConfig parse_sim_config(std::string_view text) {
  SimConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("SimConfig line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!set_sim_config_value(config, key, line.substr(eq + 1))) {
      throw ConfigError("SimConfig line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  config.validate();
  return config;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(read_file(path));
}

std::string to_text(const SimConfig& config) {
  std::string out;
  char buf[64];
  for (const auto& k : kSimKeys) {
    std::snprintf(buf, sizeof(buf), "%.17g", config.*(k.member));
    out += std::string(k.name) + "=" + buf + "\n";
  }
  return out;
}

bool applicable(Algorithm algorithm, UseCase uc) noexcept {
  return algorithm != Algorithm::kA4 || is_longitudinal(uc);
}

AlgorithmFamily family_of(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::kA4 ? AlgorithmFamily::kBrakingAndSteering
                                     : AlgorithmFamily::kBrakingOnly;
}

KinematicState initial_state(const CrashRecord& crash) {
  KinematicState s;
  s.geometry = geometry_of(crash.use_case);
  s.car_speed = kmh_to_ms(crash.car_speed_init_kmh);
  s.conflict_x = crash.long_dist_m;
  s.vru_y = crash.lat_dist_m;
  s.vru_speed = kmh_to_ms(crash.vru_speed_init_kmh);
  s.vru_dir = crash.lat_dist_m >= 0.0 ? -1.0 : 1.0;
  return s;
}

double predicted_offset(const KinematicState& s, double t) noexcept {
  const double car_y = s.car_y + s.car_vy * t;
  if (is_crossing_like(s.geometry)) {
    return s.vru_y + s.vru_dir * s.vru_speed * t - car_y;
  }
  return s.vru_y - car_y;
}

double ttc(const KinematicState& s, const SimConfig& config) noexcept {
  const double gap = s.conflict_x - s.car_x;
  if (gap <= 0.0) return kInf;
  const double closing =
      is_crossing_like(s.geometry) ? s.car_speed : s.car_speed - s.vru_speed;
  if (closing <= 0.0) return kInf;
  const double t = gap / closing;
  if (std::abs(predicted_offset(s, t)) > config.corridor_half_width()) return kInf;
  return t;
}

bool clearance_unreachable(double clearance, double lat_accel, double t) noexcept {
  if (clearance <= 0.0) return false;
  return clearance > 0.5 * lat_accel * t * t;
}

bool unavoidable_by_steering(const KinematicState& s, EvadingActor actor,
                             const SimConfig& config) noexcept {
  const double t = ttc(s, config);
  if (!std::isfinite(t)) return false;
  const double clearance =
      config.corridor_half_width() - std::abs(predicted_offset(s, t));
  double accel = 0.0;
  switch (actor) {
    case EvadingActor::kCar:
      accel = config.car_lat_accel_max;
      break;
    case EvadingActor::kVru:
      accel = config.vru_lat_accel_max;
      break;
    case EvadingActor::kBoth:
      accel = config.car_lat_accel_max + config.vru_lat_accel_max;
      break;
  }
  return clearance_unreachable(clearance, accel, t);
}

bool unavoidable_by_braking(const KinematicState& s, const SimConfig& config) noexcept {
  const double t = ttc(s, config);
  if (!std::isfinite(t)) return false;
  const double gap = s.conflict_x - s.car_x;
  const double closing =
      is_crossing_like(s.geometry) ? s.car_speed : s.car_speed - s.vru_speed;
  return closing * closing / (2.0 * gap) > config.emergency_decel;
}

Rollout simulate(const CrashRecord& crash, const Algorithm* algorithm,
                 const SimConfig& cfg) {
  KinematicState s = initial_state(crash);
  const double corridor = cfg.corridor_half_width();
  const bool crossing = is_crossing_like(s.geometry);
  const auto max_steps = static_cast<long>(std::ceil(kMaxSimTime / cfg.dt));

  Rollout r;
  r.ttc_at_detection = kInf;
  bool detected = false;
  bool emergency = false;
  bool steering = false;
  double steer_dir = 0.0;
  bool used_comfort = false;
  bool used_emergency = false;
  bool steered = false;

  for (long step = 0; step < max_steps; ++step) {
    if (!detected && vru_visible(s, crash.sight_obstruction, cfg)) {
      detected = true;
      r.ttc_at_detection = ttc(s, cfg);
    }

    double decel = 0.0;
    double lat_accel = 0.0;
    if (detected && algorithm != nullptr) {
      const double t = ttc(s, cfg);
      if (!std::isfinite(t)) {
        emergency = false;
        steering = false;
      } else {
        switch (*algorithm) {
          case Algorithm::kA1:
            if (t < cfg.emergency_ttc) emergency = true;
            break;
          case Algorithm::kA2:
            if (unavoidable_by_steering(s, EvadingActor::kBoth, cfg)) emergency = true;
            break;
          case Algorithm::kA3:
            if (unavoidable_by_steering(s, EvadingActor::kCar, cfg)) emergency = true;
            break;
          case Algorithm::kA4:
            if (emergency) break;
            if (steering) {
              if (unavoidable_by_steering(s, EvadingActor::kCar, cfg)) emergency = true;
            } else if (unavoidable_by_braking(s, cfg)) {
              if (!unavoidable_by_steering(s, EvadingActor::kCar, cfg)) {
                steering = true;
                steer_dir = predicted_offset(s, t) >= 0.0 ? -1.0 : 1.0;
              } else {
                emergency = true;
              }
            } else if (t < cfg.emergency_ttc) {
              emergency = true;
            }
            break;
        }
        if (emergency) {
          decel = cfg.emergency_decel;
          used_emergency = true;
        } else if (!steering && t >= cfg.comfort_ttc_off && t <= cfg.comfort_ttc_on) {
          decel = cfg.comfort_decel;
          used_comfort = true;
        }
        if (steering) {
          lat_accel = steer_dir * cfg.car_lat_accel_max;
          steered = true;
        }
      }
    }

    const double v0 = s.car_speed;
    const SpeedStep move = advance_speed(v0, decel, cfg.dt);
    const double car_y1 = s.car_y + s.car_vy * cfg.dt + 0.5 * lat_accel * cfg.dt * cfg.dt;
    const double car_vy1 = s.car_vy + lat_accel * cfg.dt;
    const double vru_y1 = crossing ? s.vru_y + s.vru_dir * s.vru_speed * cfg.dt : s.vru_y;
    const double conflict_x1 =
        crossing ? s.conflict_x : s.conflict_x + s.vru_speed * cfg.dt;

    const double gap0 = s.conflict_x - s.car_x;
    const double gap1 = conflict_x1 - (s.car_x + move.distance);
    if (gap0 > 0.0 && gap1 <= 0.0) {
      const double alpha = gap0 / (gap0 - gap1);
      const double offset = (s.vru_y + alpha * (vru_y1 - s.vru_y)) -
                            (s.car_y + alpha * (car_y1 - s.car_y));
      r.time_s = (step + alpha) * cfg.dt;
      if (decel > 0.0) r.braked_distance_m += alpha * move.distance;
      if (std::abs(offset) <= corridor) {
        r.collided = true;
        r.collision_speed_ms = v0 + alpha * (move.end_speed - v0);
      }
      break;
    }

    if (decel > 0.0) r.braked_distance_m += move.distance;
    s.car_x += move.distance;
    s.car_speed = move.end_speed;
    s.car_y = car_y1;
    s.car_vy = car_vy1;
    s.vru_y = vru_y1;
    s.conflict_x = conflict_x1;
    r.time_s = (step + 1) * cfg.dt;

    if (s.car_speed <= 0.0) {
      r.stopped = true;
      r.stop_distance_m = s.car_x;
      break;
    }
    if (!crossing && s.car_speed <= s.vru_speed && !steering) break;
  }
  r.intervention = classify(used_comfort, used_emergency, steered);
  return r;
}

SimOutcome run_counterfactual(const CrashRecord& crash, Algorithm algorithm,
                              const SimConfig& config) {
  if (!applicable(algorithm, crash.use_case)) {
    throw GeometryError(std::string(to_string(algorithm)) +
                        " applies to longitudinal use cases only (crash " + crash.id +
                        " is " + std::string(to_string(crash.use_case)) + ")");
  }
  const Rollout r = simulate(crash, &algorithm, config);
  SimOutcome out;
  out.crash_id = crash.id;
  out.algorithm = algorithm;
  out.avoided = !r.collided;
  out.intervention = r.intervention;
  if (r.collided) {
    out.collision_speed_kmh =
        std::clamp(quantize(ms_to_kmh(r.collision_speed_ms)), 0.0, crash.car_speed_init_kmh);
  }
  out.speed_reduction_kmh = quantize(crash.car_speed_init_kmh - out.collision_speed_kmh);
  return out;
}

double simulated_stopping_distance(double speed_ms, double decel, double dt) {
  double distance = 0.0;
  double v = speed_ms;
  while (v > 0.0) {
    const SpeedStep step = advance_speed(v, decel, dt);
    distance += step.distance;
    v = step.end_speed;
  }
  return distance;
}

int default_workers() {
  if (const char* env = std::getenv("VRU_BENEFIT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<UseCaseSummary> summarize_outcomes(const std::vector<CrashRecord>& crashes,
                                               const std::vector<SimOutcome>& outcomes) {
  std::vector<UseCaseSummary> out;
  std::array<UseCaseSummary, enum_count<UseCase>()> by_uc{};
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    auto& row = by_uc[static_cast<std::size_t>(crashes[i].use_case)];
    row.use_case = crashes[i].use_case;
    ++row.total;
    const SimOutcome& o = outcomes[i];
    if (o.avoided) {
      ++row.avoided;
    } else if (o.collision_speed_kmh < crashes[i].orig_collision_speed_kmh) {
      ++row.mitigated;
    } else {
      ++row.unchanged;
    }
  }
  for (const auto& row : by_uc) {
    if (row.total > 0) out.push_back(row);
  }
  return out;
}

BatchResult batch_simulate(const std::vector<CrashRecord>& crashes,
                           Algorithm algorithm, const SimConfig& config,
                           int workers) {
  config.validate();
  if (workers <= 0) workers = default_workers();
  const std::size_t n = crashes.size();
  BatchResult result;
  result.outcomes.resize(n);
  std::vector<std::exception_ptr> errors(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        result.outcomes[i] = run_counterfactual(crashes[i], algorithm, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1));
  if (nthreads <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.summary = summarize_outcomes(crashes, result.outcomes);
  return result;
}

Table outcomes_table(const std::vector<SimOutcome>& outcomes) {
  Table t;
  t.header = {"crash_id", "algorithm", "avoided", "collision_speed_kmh",
              "speed_reduction_kmh", "intervention"};
  for (const auto& o : outcomes) {
    t.rows.push_back({o.crash_id, std::string(to_string(o.algorithm)),
                      std::string(o.avoided ? "true" : "false"), o.collision_speed_kmh,
                      o.speed_reduction_kmh, std::string(to_string(o.intervention))});
  }
  return t;
}

Table summary_table(Algorithm algorithm, const std::vector<UseCaseSummary>& summary) {
  Table t;
  t.header = {"use_case", "algorithm", "total", "avoided", "mitigated", "unchanged",
              "pct_avoided", "pct_mitigated"};
  for (const auto& s : summary) {
    t.rows.push_back({std::string(to_string(s.use_case)),
                      std::string(to_string(algorithm)), std::int64_t{s.total},
                      std::int64_t{s.avoided}, std::int64_t{s.mitigated},
                      std::int64_t{s.unchanged}, s.pct_avoided(), s.pct_mitigated()});
  }
  return t;
}

std::vector<SimOutcome> parse_outcomes_text(std::string_view csv) {
  const CsvDocument doc = parse_csv(csv);
  require_header(doc.header, kOutcomesHeader, "outcomes");
  std::vector<SimOutcome> out;
  out.reserve(doc.rows.size());
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const std::size_t row = i + 1;
    const auto& f = doc.rows[i];
    if (f.size() != 6) throw ValueError(row, "expected 6 fields");
    SimOutcome o;
    o.crash_id = f[0];
    o.algorithm = parse_enum_field<Algorithm>(f[1], row, "algorithm");
    o.avoided = parse_bool_field(f[2], row, "avoided");
    o.collision_speed_kmh = parse_double_field(f[3], row, "collision_speed_kmh");
    o.speed_reduction_kmh = parse_double_field(f[4], row, "speed_reduction_kmh");
    o.intervention = parse_enum_field<Intervention>(f[5], row, "intervention");
    if (o.avoided && o.collision_speed_kmh != 0.0) {
      throw MismatchError("row " + std::to_string(row) +
                          ": avoided outcome with nonzero collision speed");
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<SimOutcome> parse_outcomes(const std::filesystem::path& path) {
  return parse_outcomes_text(read_file(path));
}

}  // namespace vru
