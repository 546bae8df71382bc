#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vru/avoidance.hpp"
#include "vru/benefit.hpp"
#include "vru/config.hpp"
#include "vru/extrapolation.hpp"
#include "vru/severity.hpp"
#include "vru/simulator.hpp"

namespace vru {

std::string_view version() noexcept;

struct StageRecord {
  std::string name;
  std::int64_t rows = 0;
  double seconds = 0.0;
};

struct CommandResult {
  std::string command;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::vector<StageRecord> stages;
  std::string text;  // rendered report, if any
};

// ---- Synthetic inputs ------------------------------------------------------

enum class PersonPopulation { kInDepth, kTarget };

// Person records drawn from the built-in ordered probit of `type`, shifted by
// age > 55, rural and dark-light effects. The target population is older,
// more rural and darker than the in-depth one.
std::vector<PersonRecord> generate_synthetic_persons(VruType type, int count,
                                                     std::uint64_t seed,
                                                     PersonPopulation population);

std::vector<CrashRecord> generate_crashes(const RunConfig& config);

// ---- Assessment ------------------------------------------------------------

struct AlgorithmRun {
  Algorithm algorithm = Algorithm::kA1;
  std::vector<CrashRecord> crashes;  // crashes the algorithm applies to
  std::vector<SimOutcome> outcomes;  // aligned with crashes
  std::vector<UseCaseSummary> summary;
};

// GeometryError when A4 is requested without longitudinal crashes.
std::vector<AlgorithmRun> simulate_all(const std::vector<CrashRecord>& crashes,
                                       const std::vector<Algorithm>& algorithms,
                                       const SimConfig& sim, int workers);
// Aligns parsed outcomes to crashes by id; MismatchError on gaps.
std::vector<AlgorithmRun> runs_from_outcomes(const std::vector<CrashRecord>& crashes,
                                             const std::vector<Algorithm>& algorithms,
                                             const std::vector<SimOutcome>& outcomes);

struct PreparedData {
  std::vector<CrashRecord> crashes;
  std::vector<TestObservation> tests;
  std::vector<PersonRecord> persons_indepth;
  std::vector<AlgorithmRun> runs;
  std::vector<SpeedModel> speed_models;  // run order, then use-case order
  std::vector<StageRecord> stages;
  std::vector<std::filesystem::path> inputs;
};

// Reads inputs named by `config` and runs the variant-independent stages.
PreparedData prepare(const RunConfig& config, int workers);
PreparedData prepare(const RunConfig& config, std::vector<CrashRecord> crashes,
                     std::vector<TestObservation> tests,
                     std::vector<PersonRecord> persons_indepth, int workers);

struct Variant {
  double w = 2.0;
  IrcFamily family = IrcFamily::kOrderedProbit;
  StatisticalMode mode = StatisticalMode::kBayesian;

  std::string name() const;
  bool operator==(const Variant&) const = default;
};

Variant primary_variant(const RunConfig& config);

struct CaseResult {
  UseCase use_case = UseCase::kUC1;
  Algorithm algorithm = Algorithm::kA1;
  std::vector<CrashRecord> crashes;
  AvoidanceModel avoidance;
  SpeedModel speed;
};

struct VariantResult {
  Variant variant;
  std::vector<CaseResult> cases;
  std::map<VruType, InjuryRiskModel> irc;
  // Per algorithm and level: use-case rows, then Total, TotalCyclist and
  // TotalPedestrian.
  std::vector<BenefitEstimate> benefits;
};

std::map<VruType, InjuryRiskModel> injury_models(const PreparedData& data,
                                                 const RunConfig& config, IrcFamily family);
VariantResult run_variant(const PreparedData& data, const RunConfig& config,
                          const Variant& variant);

// ---- Extrapolation ---------------------------------------------------------

struct ExtrapolatedBenefit {
  VruType vru_type = VruType::kCyclist;
  Algorithm algorithm = Algorithm::kA1;
  RiskLevel level = RiskLevel::kFatal;
  double indepth = 0.0;
  double indepth_low = 0.0;
  double indepth_high = 0.0;
  double extrapolated = 0.0;
  double low90 = 0.0;
  double high90 = 0.0;
  double scaled = 0.0;
  double scaled_low90 = 0.0;
  double scaled_high90 = 0.0;
};

struct ExtrapolationResult {
  std::map<VruType, Tree> trees;
  std::map<VruType, std::vector<ExtrapolationFactor>> factors;
  std::vector<ExtrapolatedBenefit> rows;
};

ExtrapolationResult extrapolate(const VariantResult& assessment,
                                const std::vector<PersonRecord>& indepth,
                                const std::vector<PersonRecord>& target,
                                const TreeParams& tree, const DeploymentParams& deployment);

Table extrapolated_table(const std::vector<ExtrapolatedBenefit>& rows);

// ---- Sensitivity -----------------------------------------------------------

struct SensitivityCell {
  Variant variant;
  std::string error;  // empty on success
  std::vector<BenefitEstimate> totals;  // aggregate rows of the sweep algorithm
};

std::vector<Variant> sensitivity_variants(const RunConfig& config);
std::vector<SensitivityCell> sensitivity_sweep(const PreparedData& data, const RunConfig& config);
Table sensitivity_table(const std::vector<SensitivityCell>& cells);

// ---- Commands --------------------------------------------------------------

CommandResult cmd_generate(const RunConfig& config);
CommandResult cmd_simulate(const RunConfig& config, int workers);
CommandResult cmd_assess(const RunConfig& config, int workers);
CommandResult cmd_extrapolate(const RunConfig& config, int workers);
CommandResult cmd_sensitivity(const RunConfig& config, int workers);
CommandResult cmd_report(const RunConfig& config);

}  // namespace vru
