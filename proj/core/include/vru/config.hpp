#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vru/avoidance.hpp"
#include "vru/benefit.hpp"
#include "vru/domain.hpp"
#include "vru/extrapolation.hpp"
#include "vru/severity.hpp"
#include "vru/simulator.hpp"

namespace vru {

// Crash counts per use case matching the proportions of the reference
// in-depth sample (1,943 crashes).
std::map<UseCase, int> default_crash_counts();

enum class IrcSource { kAuto, kBuiltin, kFit };
VRU_ENUM_NAMES(IrcSource, "auto"sv, "builtin"sv, "fit"sv);

struct RunConfig {
  std::uint64_t seed = 1;
  double w = 2.0;
  QuantileLevels quantiles;
  std::vector<Algorithm> algorithms = {Algorithm::kA1, Algorithm::kA2, Algorithm::kA3,
                                       Algorithm::kA4};
  IrcFamily irc_family = IrcFamily::kOrderedProbit;
  StatisticalMode statistical_mode = StatisticalMode::kBayesian;
  std::optional<CurveForm> curve_form;  // nullopt: automatic
  IrcSource irc_source = IrcSource::kAuto;
  DeploymentParams deployment;
  SimConfig sim;
  TreeParams tree;

  std::filesystem::path out_dir = "out";
  // Empty paths resolve inside out_dir (tests: none).
  std::filesystem::path crashes;
  std::filesystem::path tests;
  std::filesystem::path outcomes;
  std::filesystem::path persons_indepth;
  std::filesystem::path persons_target;

  std::map<UseCase, int> crash_counts = default_crash_counts();
  int persons_indepth_count = 1500;  // per VRU type
  int persons_target_count = 50000;  // per VRU type

  std::vector<double> sensitivity_w = {0.0, 1.0, 2.0, 10.0};
  std::vector<IrcFamily> sensitivity_families = {IrcFamily::kOrderedProbit,
                                                 IrcFamily::kLogistic};
  std::vector<StatisticalMode> sensitivity_modes = {StatisticalMode::kBayesian,
                                                    StatisticalMode::kFrequentist};
  Algorithm sensitivity_algorithm = Algorithm::kA1;

  std::int64_t mc_draws = 0;

  // Throws ConfigError on violated invariants.
  void validate() const;

  std::filesystem::path crashes_path() const;
  std::filesystem::path persons_indepth_path() const;
  std::filesystem::path persons_target_path() const;
  std::filesystem::path output(std::string_view name) const { return out_dir / name; }
};

// Applies one key=value setting; unknown keys and bad values are ConfigErrors.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
// Flat key=value text, '#' comments.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Ordered snapshot of every setting, as accepted by apply_setting.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

std::string format_exact(double value);
std::vector<std::string> split_list(std::string_view text);

}  // namespace vru
