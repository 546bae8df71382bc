#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vru/avoidance.hpp"
#include "vru/csv.hpp"
#include "vru/domain.hpp"
#include "vru/severity.hpp"

namespace vru {

// Crash mass per integer collision speed (km/h).
struct FrequencyFunction {
  std::map<int, double> counts;

  double mass() const noexcept;
  int max_speed() const noexcept;  // L; 0 for an empty function
  double at(int v) const noexcept;
};

// Histogram of original collision speeds rounded to the nearest integer.
FrequencyFunction original_frequency(const std::vector<CrashRecord>& crashes);

// kPessimistic pairs the lower avoidance curve with the high speed bound,
// kOptimistic the upper curve with the low speed bound.
enum class FrequencyVariant { kPoint, kPessimistic, kOptimistic };

struct CrashPrediction {
  double p_avoid = 0.0;
  double speed = 0.0;  // integer km/h
};

CrashPrediction predict_crash(const CrashRecord& crash, const AvoidanceCurve& curve,
                              const SpeedModel& model, FrequencyVariant variant);

FrequencyFunction transformed_frequency(const std::vector<CrashRecord>& crashes,
                                        const AvoidanceCurve& curve, const SpeedModel& model,
                                        FrequencyVariant variant = FrequencyVariant::kPoint);

// Sum over integer speeds of f(v) * r(v).
double expected_casualties(const FrequencyFunction& f, const InjuryRiskModel& irc,
                           RiskLevel level);

struct BenefitEstimate {
  std::string group;  // use case name or aggregate label
  Algorithm algorithm = Algorithm::kA1;
  RiskLevel level = RiskLevel::kFatal;
  double e_orig = 0.0;
  double e_new = 0.0;
  double e_pessimistic = 0.0;
  double e_optimistic = 0.0;
  double reduction_pct = 0.0;
  double low90 = 0.0;
  double high90 = 0.0;
};

inline constexpr const char* kTotalGroup = "Total";
inline constexpr const char* kTotalCyclistGroup = "TotalCyclist";
inline constexpr const char* kTotalPedestrianGroup = "TotalPedestrian";

// Fills the percentage fields from the expected counts. ZeroBaselineError
// when e_orig is 0.
void finalize_percentages(BenefitEstimate& estimate);

BenefitEstimate posterior_benefit(const std::vector<CrashRecord>& crashes,
                                  const AvoidanceCurve& curve, const SpeedModel& model,
                                  const InjuryRiskModel& irc, RiskLevel level);

// Sums expected counts, then forms percentages.
BenefitEstimate aggregate_benefit(const std::string& group,
                                  const std::vector<BenefitEstimate>& parts);

// Expected casualties avoided per crash: r(v_orig) - (1 - p) r(v_new).
std::vector<double> per_crash_reduction(const std::vector<CrashRecord>& crashes,
                                        const AvoidanceCurve& curve, const SpeedModel& model,
                                        const InjuryRiskModel& irc, RiskLevel level,
                                        FrequencyVariant variant = FrequencyVariant::kPoint);

struct MonteCarloResult {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t draws = 0;
};

inline constexpr std::int64_t kMonteCarloBlock = 1024;

// Total casualties with the system: each crash is avoided with probability
// p(c), else contributes r(v_new(c)). Draw blocks use independent streams, so
// the result does not depend on `workers`.
MonteCarloResult monte_carlo_benefit(const std::vector<CrashRecord>& crashes,
                                     const AvoidanceCurve& curve, const SpeedModel& model,
                                     const InjuryRiskModel& irc, RiskLevel level,
                                     std::int64_t draws, std::uint64_t seed, int workers = 1);
MonteCarloResult monte_carlo_casualties(const std::vector<CrashPrediction>& predictions,
                                        const std::vector<double>& risks, std::int64_t draws,
                                        std::uint64_t seed, int workers = 1);

struct DeploymentParams {
  double market_penetration = 0.2;
  double user_acceptance = 0.82;

  void validate() const;
  double factor() const noexcept { return user_acceptance * market_penetration; }
};

double scale_benefit(double max_benefit, const DeploymentParams& params);

Table benefit_table(const std::vector<BenefitEstimate>& estimates);

}  // namespace vru
