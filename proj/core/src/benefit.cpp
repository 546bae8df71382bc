#include "vru/benefit.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "vru/error.hpp"
#include "vru/rng.hpp"

namespace vru {

double FrequencyFunction::mass() const noexcept {
  double m = 0.0;
  for (const auto& [v, f] : counts) m += f;
  return m;
}

int FrequencyFunction::max_speed() const noexcept {
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return 0;
}

double FrequencyFunction::at(int v) const noexcept {
  const auto it = counts.find(v);
  return it == counts.end() ? 0.0 : it->second;
}

FrequencyFunction original_frequency(const std::vector<CrashRecord>& crashes) {
  FrequencyFunction f;
  for (const auto& c : crashes) {
    f.counts[static_cast<int>(std::lround(c.orig_collision_speed_kmh))] += 1.0;
  }
  return f;
}

CrashPrediction predict_crash(const CrashRecord& crash, const AvoidanceCurve& curve,
                              const SpeedModel& model, FrequencyVariant variant) {
  const SpeedPrediction speed = predict_collision_speed(model, crash);
  const double v = crash.car_speed_init_kmh;
  switch (variant) {
    case FrequencyVariant::kPoint:
      return {evaluate(curve, v, Bound::kMedian), speed.point};
    case FrequencyVariant::kPessimistic:
      return {evaluate(curve, v, Bound::kLower), speed.high};
    case FrequencyVariant::kOptimistic:
      return {evaluate(curve, v, Bound::kUpper), speed.low};
  }
  return {};
}

FrequencyFunction transformed_frequency(const std::vector<CrashRecord>& crashes,
                                        const AvoidanceCurve& curve, const SpeedModel& model,
                                        FrequencyVariant variant) {
  FrequencyFunction f;
  for (const auto& c : crashes) {
    const CrashPrediction p = predict_crash(c, curve, model, variant);
    f.counts[static_cast<int>(p.speed)] += 1.0 - p.p_avoid;
  }
  return f;
}

double expected_casualties(const FrequencyFunction& f, const InjuryRiskModel& irc,
                           RiskLevel level) {
  double e = 0.0;
  for (const auto& [v, mass] : f.counts) {
    if (mass == 0.0) continue;
    e += mass * injury_risk(irc, level, static_cast<double>(v));
  }
  return e;
}

void finalize_percentages(BenefitEstimate& e) {
  if (!(e.e_orig > 0.0)) {
    throw ZeroBaselineError("no expected casualties without the system for " + e.group + "/" +
                            std::string(to_string(e.algorithm)) + "/" +
                            std::string(to_string(e.level)));
  }
  e.reduction_pct = 100.0 * (1.0 - e.e_new / e.e_orig);
  e.low90 = 100.0 * (1.0 - e.e_pessimistic / e.e_orig);
  e.high90 = 100.0 * (1.0 - e.e_optimistic / e.e_orig);
}

BenefitEstimate posterior_benefit(const std::vector<CrashRecord>& crashes,
                                  const AvoidanceCurve& curve, const SpeedModel& model,
                                  const InjuryRiskModel& irc, RiskLevel level) {
  BenefitEstimate e;
  e.group = crashes.empty() ? std::string() : std::string(to_string(crashes.front().use_case));
  e.algorithm = model.algorithm;
  e.level = level;
  e.e_orig = expected_casualties(original_frequency(crashes), irc, level);
  e.e_new = expected_casualties(
      transformed_frequency(crashes, curve, model, FrequencyVariant::kPoint), irc, level);
  e.e_pessimistic = expected_casualties(
      transformed_frequency(crashes, curve, model, FrequencyVariant::kPessimistic), irc, level);
  e.e_optimistic = expected_casualties(
      transformed_frequency(crashes, curve, model, FrequencyVariant::kOptimistic), irc, level);
  finalize_percentages(e);
  return e;
}

BenefitEstimate aggregate_benefit(const std::string& group,
                                  const std::vector<BenefitEstimate>& parts) {
  BenefitEstimate e;
  e.group = group;
  if (!parts.empty()) {
    e.algorithm = parts.front().algorithm;
    e.level = parts.front().level;
  }
  for (const auto& p : parts) {
    e.e_orig += p.e_orig;
    e.e_new += p.e_new;
    e.e_pessimistic += p.e_pessimistic;
    e.e_optimistic += p.e_optimistic;
  }
  finalize_percentages(e);
  return e;
}

std::vector<double> per_crash_reduction(const std::vector<CrashRecord>& crashes,
                                        const AvoidanceCurve& curve, const SpeedModel& model,
                                        const InjuryRiskModel& irc, RiskLevel level,
                                        FrequencyVariant variant) {
  std::vector<double> out;
  out.reserve(crashes.size());
  for (const auto& c : crashes) {
    const CrashPrediction p = predict_crash(c, curve, model, variant);
    const double before =
        injury_risk(irc, level, static_cast<double>(std::lround(c.orig_collision_speed_kmh)));
    out.push_back(before - (1.0 - p.p_avoid) * injury_risk(irc, level, p.speed));
  }
  return out;
}

MonteCarloResult monte_carlo_casualties(const std::vector<CrashPrediction>& predictions,
                                        const std::vector<double>& risks, std::int64_t draws,
                                        std::uint64_t seed, int workers) {
  if (draws < 1) throw ConfigError("Monte Carlo needs at least one draw");
  // Deviations from the analytic expectation keep the accumulation well
  // conditioned and make degenerate cases exact.
  double reference = 0.0;
  for (std::size_t c = 0; c < predictions.size(); ++c) {
    reference += (1.0 - predictions[c].p_avoid) * risks[c];
  }
  const std::int64_t blocks = (draws + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<double> block_sum(static_cast<std::size_t>(blocks), 0.0);
  std::vector<double> block_sq(static_cast<std::size_t>(blocks), 0.0);

  auto run_block = [&](std::int64_t b) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    const std::int64_t begin = b * kMonteCarloBlock;
    const std::int64_t end = std::min(draws, begin + kMonteCarloBlock);
    double s = 0.0;
    double sq = 0.0;
    for (std::int64_t d = begin; d < end; ++d) {
      double total = 0.0;
      for (std::size_t c = 0; c < predictions.size(); ++c) {
        if (!(rng.uniform() < predictions[c].p_avoid)) total += risks[c];
      }
      const double dev = total - reference;
      s += dev;
      sq += dev * dev;
    }
    block_sum[static_cast<std::size_t>(b)] = s;
    block_sq[static_cast<std::size_t>(b)] = sq;
  };

  const auto nthreads = std::clamp<std::int64_t>(workers, 1, blocks);
  if (nthreads == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (std::int64_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (std::int64_t b = t; b < blocks; b += nthreads) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  double s = 0.0;
  double sq = 0.0;
  for (std::int64_t b = 0; b < blocks; ++b) {
    s += block_sum[static_cast<std::size_t>(b)];
    sq += block_sq[static_cast<std::size_t>(b)];
  }
  const double n = static_cast<double>(draws);
  const double mean_dev = s / n;
  MonteCarloResult r;
  r.draws = draws;
  r.mean = reference + mean_dev;
  if (draws > 1) {
    const double var = std::max(0.0, (sq - n * mean_dev * mean_dev) / (n - 1.0));
    r.std_err = std::sqrt(var / n);
  }
  return r;
}

MonteCarloResult monte_carlo_benefit(const std::vector<CrashRecord>& crashes,
                                     const AvoidanceCurve& curve, const SpeedModel& model,
                                     const InjuryRiskModel& irc, RiskLevel level,
                                     std::int64_t draws, std::uint64_t seed, int workers) {
  std::vector<CrashPrediction> predictions;
  std::vector<double> risks;
  for (const auto& c : crashes) {
    predictions.push_back(predict_crash(c, curve, model, FrequencyVariant::kPoint));
    risks.push_back(injury_risk(irc, level, predictions.back().speed));
  }
  return monte_carlo_casualties(predictions, risks, draws, seed, workers);
}

void DeploymentParams::validate() const {
  if (!(market_penetration > 0.0 && market_penetration <= 1.0) ||
      !(user_acceptance > 0.0 && user_acceptance <= 1.0)) {
    throw ConfigError("market penetration and user acceptance must lie in (0, 1]");
  }
}

double scale_benefit(double max_benefit, const DeploymentParams& params) {
  params.validate();
  return params.factor() * max_benefit;
}

Table benefit_table(const std::vector<BenefitEstimate>& estimates) {
  Table t;
  t.header = {"use_case", "algorithm", "level", "e_orig", "e_new",
              "reduction_pct", "low90", "high90"};
  for (const auto& e : estimates) {
    t.rows.push_back({e.group, std::string(to_string(e.algorithm)),
                      std::string(to_string(e.level)), e.e_orig, e.e_new, e.reduction_pct,
                      e.low90, e.high90});
  }
  return t;
}

}  // namespace vru
