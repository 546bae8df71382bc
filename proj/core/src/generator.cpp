#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "vru/error.hpp"
#include "vru/rng.hpp"
#include "vru/simulator.hpp"

namespace vru {

namespace {

constexpr int kMaxAttempts = 100000;

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

// Probabilities over {No, NotPermanent, Permanent, Other}.
std::array<double, 4> sight_weights(UseCase uc) {
  switch (uc) {
    case UseCase::kUC11:
      return {0.20, 0.40, 0.30, 0.10};
    case UseCase::kUC9:
    case UseCase::kUC12:
      return {0.80, 0.05, 0.05, 0.10};
    default:
      return {0.60, 0.15, 0.15, 0.10};
  }
}

double urban_share(UseCase uc) { return is_longitudinal(uc) ? 0.60 : 0.85; }

// Side the VRU approaches from: +1 left of the car path, -1 right, 0 random.
int approach_side(UseCase uc) {
  switch (uc) {
    case UseCase::kUC3:
    case UseCase::kUC5:
    case UseCase::kUC10:
    case UseCase::kUC11:
    case UseCase::kUC2:
      return 1;
    case UseCase::kUC4:
    case UseCase::kUC6:
      return -1;
    default:
      return 0;
  }
}

template <std::size_t N>
std::size_t draw_index(CounterRng& rng, const std::array<double, N>& weights) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < N; ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return N - 1;
}

CrashRecord draw_candidate(UseCase uc, CounterRng& rng, const SimConfig& cfg) {
  CrashRecord c;
  c.use_case = uc;
  c.vru_type = vru_type_of(uc);
  const bool longitudinal = is_longitudinal(uc);
  c.car_speed_init_kmh =
      static_cast<double>(longitudinal ? rng.uniform_int(30, 80) : rng.uniform_int(10, 60));
  const double dummy_kmh = c.vru_type == VruType::kCyclist ? 15.0 : 5.0;
  c.vru_speed_init_kmh = round3(dummy_kmh * rng.uniform(0.7, 1.3));
  const double arrival = rng.uniform(0.8, 4.0);
  const double car_ms = kmh_to_ms(c.car_speed_init_kmh);
  const double vru_ms = kmh_to_ms(c.vru_speed_init_kmh);
  if (longitudinal) {
    c.long_dist_m = round3((car_ms - vru_ms) * arrival);
    c.lat_dist_m = round3(rng.uniform(-1.1, 1.1));
  } else {
    const double corridor = cfg.corridor_half_width();
    const double impact_offset = rng.uniform(-0.85 * corridor, 0.85 * corridor);
    int side = approach_side(uc);
    const double coin = rng.uniform();
    if (side == 0) side = coin < 0.5 ? -1 : 1;
    c.long_dist_m = round3(car_ms * arrival);
    c.lat_dist_m = round3(impact_offset + side * vru_ms * arrival);
  }
  c.sight_obstruction = static_cast<SightObstruction>(draw_index(rng, sight_weights(uc)));
  c.location = rng.uniform() < urban_share(uc) ? Location::kUrban : Location::kRural;
  return c;
}

}  // namespace

std::vector<CrashRecord> generate_synthetic_usecase(UseCase uc, int count,
                                                    std::uint64_t seed,
                                                    const SimConfig& config) {
  if (count < 0) throw ValueError(0, "count must be >= 0");
  config.validate();
  std::vector<CrashRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::uint64_t key = derive_seed(seed, to_string(uc));
  const double min_ttc = config.comfort_ttc_off + 2.0 * config.dt;
  for (int i = 0; i < count; ++i) {
    CounterRng rng(derive_seed(key, static_cast<std::uint64_t>(i)));
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      CrashRecord c = draw_candidate(uc, rng, config);
      const Rollout replay = simulate(c, nullptr, config);
      if (!replay.collided || !(replay.ttc_at_detection >= min_ttc)) continue;
      if (!std::isfinite(replay.ttc_at_detection)) continue;
      c.orig_collision_speed_kmh = std::min(
          c.car_speed_init_kmh, round3(ms_to_kmh(replay.collision_speed_ms)));
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%05d", std::string(to_string(uc)).c_str(), i + 1);
      c.id = id;
      out.push_back(std::move(c));
      accepted = true;
    }
    if (!accepted) {
      throw NonConvergenceError("scenario generation for " + std::string(to_string(uc)) +
                                    " found no colliding configuration",
                                {});
    }
  }
  return out;
}

}  // namespace vru
