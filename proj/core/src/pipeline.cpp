#include "vru/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vru/error.hpp"
#include "vru/io.hpp"
#include "vru/rng.hpp"

namespace vru {

std::string_view version() noexcept { return VRU_VERSION; }

namespace {

constexpr std::array<RiskLevel, 2> kLevels = {RiskLevel::kFatal, RiskLevel::kSeriousOrWorse};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <class F>
auto in_stage(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.what());
  }
}

std::string case_label(UseCase uc, Algorithm alg) {
  return std::string(to_string(uc)) + "/" + std::string(to_string(alg));
}

void append_rows(Table& into, const Table& from) {
  if (into.header.empty()) into.header = from.header;
  into.rows.insert(into.rows.end(), from.rows.begin(), from.rows.end());
}

template <class T, std::size_t N>
T pick(CounterRng& rng, const std::array<T, N>& values, const std::array<double, N>& probs) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values[N - 1];
}

std::vector<PersonRecord> persons_of(const std::vector<PersonRecord>& persons, VruType type) {
  std::vector<PersonRecord> out;
  for (const auto& p : persons) {
    if (p.vru_type == type) out.push_back(p);
  }
  return out;
}

void write_table(CommandResult& result, const RunConfig& config, const std::string& name,
                 const Table& table) {
  const auto path = config.output(name);
  emit_table(table, path);
  result.outputs.push_back(path);
}

void write_text(CommandResult& result, const RunConfig& config, const std::string& name,
                const std::string& text) {
  const auto path = config.output(name);
  write_file(path, text);
  result.outputs.push_back(path);
}

}  // namespace

// ---- Synthetic inputs ------------------------------------------------------

std::vector<PersonRecord> generate_synthetic_persons(VruType type, int count,
                                                     std::uint64_t seed,
                                                     PersonPopulation population) {
  const bool target = population == PersonPopulation::kTarget;
  const InjuryRiskModel m = builtin_probit(type);
  const double p_old = target ? 0.35 : 0.25;
  const double p_urban = target ? 0.65 : 0.8;
  const double p_dark = target ? 0.28 : 0.18;
  const std::array<std::string, 4> weathers = {"Dry", "Rain", "Snow", "Fog"};
  const std::array<double, 4> weather_p =
      target ? std::array<double, 4>{0.6, 0.28, 0.07, 0.05}
             : std::array<double, 4>{0.7, 0.2, 0.05, 0.05};
  const std::array<std::string, 3> surfaces = {"Dry", "Wet", "Icy"};
  const std::array<std::string, 3> sites = {"Junction", "Link", "Roundabout"};

  std::vector<PersonRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    PersonRecord p;
    p.vru_type = type;
    const bool old = rng.uniform() < p_old;
    p.age = static_cast<double>(old ? rng.uniform_int(56, 90) : rng.uniform_int(6, 55));
    p.gender = rng.uniform() < 0.6 ? Gender::kMale : Gender::kFemale;
    p.weather = pick(rng, weathers, weather_p);
    p.surface = p.weather == "Dry" ? pick(rng, surfaces, std::array<double, 3>{0.9, 0.08, 0.02})
                                   : pick(rng, surfaces, std::array<double, 3>{0.2, 0.65, 0.15});
    const double u_light = rng.uniform();
    const bool dark = u_light < p_dark;
    p.light = dark ? "Dark" : (u_light < p_dark + 0.1 ? "Twilight" : "Daylight");
    p.site = pick(rng, sites, std::array<double, 3>{0.5, 0.4, 0.1});
    const bool urban = rng.uniform() < p_urban;
    p.urban = urban;
    p.collision_speed_kmh = static_cast<double>(rng.uniform_int(10, 90));
    const double latent = m.beta * p.collision_speed_kmh + 0.5 * ((old ? 1.0 : 0.0) - 0.25) +
                          0.4 * ((urban ? 0.0 : 1.0) - 0.2) + 0.3 * ((dark ? 1.0 : 0.0) - 0.18) +
                          rng.normal();
    p.injury = latent <= m.tau1   ? Injury::kSlight
               : latent <= m.tau2 ? Injury::kSerious
                                  : Injury::kFatal;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<CrashRecord> generate_crashes(const RunConfig& config) {
  std::vector<CrashRecord> out;
  for (const auto& [uc, n] : config.crash_counts) {
    if (n <= 0) continue;
    auto part = generate_synthetic_usecase(uc, n, config.seed, config.sim);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

namespace {

std::vector<PersonRecord> generate_population(const RunConfig& config,
                                              PersonPopulation population) {
  const bool target = population == PersonPopulation::kTarget;
  const int count = target ? config.persons_target_count : config.persons_indepth_count;
  std::vector<PersonRecord> out;
  for (VruType type : all_values<VruType>()) {
    const std::string label = std::string(target ? "persons/target/" : "persons/indepth/") +
                              std::string(to_string(type));
    auto part = generate_synthetic_persons(type, count, derive_seed(config.seed, label),
                                           population);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace

// ---- Assessment ------------------------------------------------------------

std::vector<AlgorithmRun> simulate_all(const std::vector<CrashRecord>& crashes,
                                       const std::vector<Algorithm>& algorithms,
                                       const SimConfig& sim, int workers) {
  std::vector<AlgorithmRun> runs;
  for (Algorithm alg : algorithms) {
    AlgorithmRun run;
    run.algorithm = alg;
    for (const auto& c : crashes) {
      if (applicable(alg, c.use_case)) run.crashes.push_back(c);
    }
    if (run.crashes.empty() && alg == Algorithm::kA4) {
      throw GeometryError("A4 requested but the data contain no longitudinal use case");
    }
    BatchResult batch = batch_simulate(run.crashes, alg, sim, workers);
    run.outcomes = std::move(batch.outcomes);
    run.summary = std::move(batch.summary);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<AlgorithmRun> runs_from_outcomes(const std::vector<CrashRecord>& crashes,
                                             const std::vector<Algorithm>& algorithms,
                                             const std::vector<SimOutcome>& outcomes) {
  std::unordered_map<std::string, const SimOutcome*> index;
  for (const auto& o : outcomes) {
    index[std::string(to_string(o.algorithm)) + "|" + o.crash_id] = &o;
  }
  std::vector<AlgorithmRun> runs;
  for (Algorithm alg : algorithms) {
    AlgorithmRun run;
    run.algorithm = alg;
    for (const auto& c : crashes) {
      if (!applicable(alg, c.use_case)) continue;
      const auto it = index.find(std::string(to_string(alg)) + "|" + c.id);
      if (it == index.end()) {
        throw MismatchError("no " + std::string(to_string(alg)) + " outcome for crash " + c.id);
      }
      run.crashes.push_back(c);
      run.outcomes.push_back(*it->second);
    }
    if (run.crashes.empty() && alg == Algorithm::kA4) {
      throw GeometryError("A4 requested but the data contain no longitudinal use case");
    }
    run.summary = summarize_outcomes(run.crashes, run.outcomes);
    runs.push_back(std::move(run));
  }
  return runs;
}

namespace {

std::vector<UseCase> use_cases_of(const std::vector<CrashRecord>& crashes) {
  std::set<UseCase> ucs;
  for (const auto& c : crashes) ucs.insert(c.use_case);
  return {ucs.begin(), ucs.end()};
}

template <class T>
std::vector<T> filter_uc(const std::vector<CrashRecord>& crashes, const std::vector<T>& items,
                         UseCase uc) {
  std::vector<T> out;
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    if (crashes[i].use_case == uc) out.push_back(items[i]);
  }
  return out;
}

}  // namespace

PreparedData prepare(const RunConfig& config, std::vector<CrashRecord> crashes,
                     std::vector<TestObservation> tests,
                     std::vector<PersonRecord> persons_indepth, int workers) {
  PreparedData d;
  d.crashes = std::move(crashes);
  d.tests = std::move(tests);
  d.persons_indepth = std::move(persons_indepth);

  Stopwatch sw;
  if (!config.outcomes.empty()) {
    const auto outcomes = parse_outcomes(config.outcomes);
    d.inputs.push_back(config.outcomes);
    d.runs = runs_from_outcomes(d.crashes, config.algorithms, outcomes);
  } else {
    d.runs = simulate_all(d.crashes, config.algorithms, config.sim, workers);
  }
  std::int64_t n_outcomes = 0;
  for (const auto& r : d.runs) n_outcomes += static_cast<std::int64_t>(r.outcomes.size());
  d.stages.push_back({"simulate", n_outcomes, sw.seconds()});

  Stopwatch sw_speed;
  for (const auto& run : d.runs) {
    for (UseCase uc : use_cases_of(run.crashes)) {
      SpeedModel m = in_stage("speed_model " + case_label(uc, run.algorithm), [&] {
        return fit_speed_model_or_fallback(filter_uc(run.crashes, run.crashes, uc),
                                           filter_uc(run.crashes, run.outcomes, uc));
      });
      m.use_case = uc;
      m.algorithm = run.algorithm;
      d.speed_models.push_back(std::move(m));
    }
  }
  d.stages.push_back(
      {"speed_models", static_cast<std::int64_t>(d.speed_models.size()), sw_speed.seconds()});
  return d;
}

PreparedData prepare(const RunConfig& config, int workers) {
  config.validate();
  Stopwatch sw;
  std::vector<std::filesystem::path> inputs;
  const auto crashes_path = config.crashes_path();
  auto crashes = parse_crashes(crashes_path);
  inputs.push_back(crashes_path);
  std::vector<TestObservation> tests;
  if (!config.tests.empty()) {
    tests = parse_tests(config.tests);
    inputs.push_back(config.tests);
  }
  std::vector<PersonRecord> persons;
  const auto persons_path = config.persons_indepth_path();
  if (!config.persons_indepth.empty() || std::filesystem::exists(persons_path)) {
    persons = parse_persons(persons_path);
    inputs.push_back(persons_path);
  }
  const double read_seconds = sw.seconds();
  const auto n_rows = static_cast<std::int64_t>(crashes.size() + tests.size() + persons.size());
  PreparedData d =
      prepare(config, std::move(crashes), std::move(tests), std::move(persons), workers);
  d.stages.insert(d.stages.begin(), StageRecord{"read_inputs", n_rows, read_seconds});
  d.inputs.insert(d.inputs.begin(), inputs.begin(), inputs.end());
  return d;
}

std::string Variant::name() const {
  return "w" + format_number(w) + "_" + std::string(to_string(family)) + "_" +
         std::string(to_string(mode));
}

Variant primary_variant(const RunConfig& config) {
  return {config.w, config.irc_family, config.statistical_mode};
}

std::map<VruType, InjuryRiskModel> injury_models(const PreparedData& data,
                                                 const RunConfig& config, IrcFamily family) {
  std::set<VruType> types;
  for (const auto& c : data.crashes) types.insert(c.vru_type);
  std::map<VruType, InjuryRiskModel> out;
  for (VruType type : types) {
    const std::string where = "irc " + std::string(to_string(type));
    if (family == IrcFamily::kOrderedProbit && config.irc_source != IrcSource::kFit) {
      out[type] = builtin_probit(type);
      continue;
    }
    if (family == IrcFamily::kLogistic && config.irc_source == IrcSource::kBuiltin) {
      throw ConfigError("no built-in logistic injury risk curves; use irc_source=fit");
    }
    const auto persons = persons_of(data.persons_indepth, type);
    if (persons.empty()) {
      throw Error(ErrorKind::kInput,
                  where + ": InsufficientDataError: no in-depth person records to fit");
    }
    out[type] = in_stage(where, [&] {
      return family == IrcFamily::kOrderedProbit ? fit_ordered_probit(persons)
                                                 : fit_logistic_irc_model(persons);
    });
    out[type].vru_type = type;
  }
  return out;
}

namespace {

VariantResult run_variant_for(const PreparedData& data, const RunConfig& config,
                              const Variant& variant, const std::vector<Algorithm>& algorithms) {
  VariantResult r;
  r.variant = variant;
  r.irc = injury_models(data, config, variant.family);

  AvoidanceOptions opts;
  opts.w = variant.w;
  opts.mode = variant.mode;
  opts.quantiles = config.quantiles;
  opts.form = config.curve_form;

  for (const auto& run : data.runs) {
    if (std::find(algorithms.begin(), algorithms.end(), run.algorithm) == algorithms.end()) {
      continue;
    }
    for (UseCase uc : use_cases_of(run.crashes)) {
      const std::string where = "avoidance " + case_label(uc, run.algorithm);
      CaseResult cr;
      cr.use_case = uc;
      cr.algorithm = run.algorithm;
      cr.crashes = filter_uc(run.crashes, run.crashes, uc);
      cr.avoidance = in_stage(where, [&] {
        return build_avoidance_model(uc, run.algorithm, cr.crashes,
                                     filter_uc(run.crashes, run.outcomes, uc), data.tests, opts);
      });
      const auto sm = std::find_if(data.speed_models.begin(), data.speed_models.end(),
                                   [&](const SpeedModel& m) {
                                     return m.use_case == uc && m.algorithm == run.algorithm;
                                   });
      if (sm == data.speed_models.end()) {
        throw Error(ErrorKind::kInput, "speed model missing for " + case_label(uc, run.algorithm));
      }
      cr.speed = *sm;
      r.cases.push_back(std::move(cr));
    }
  }

  for (Algorithm alg : algorithms) {
    for (RiskLevel level : kLevels) {
      std::vector<BenefitEstimate> all, cyclist, pedestrian;
      for (const auto& cr : r.cases) {
        if (cr.algorithm != alg) continue;
        const VruType type = cr.crashes.front().vru_type;
        BenefitEstimate e = in_stage("benefit " + case_label(cr.use_case, alg), [&] {
          return posterior_benefit(cr.crashes, cr.avoidance.curve, cr.speed, r.irc.at(type),
                                   level);
        });
        e.group = std::string(to_string(cr.use_case));
        r.benefits.push_back(e);
        all.push_back(e);
        (type == VruType::kCyclist ? cyclist : pedestrian).push_back(e);
      }
      const std::string where = "benefit aggregate " + std::string(to_string(alg));
      if (!all.empty()) {
        r.benefits.push_back(in_stage(where, [&] { return aggregate_benefit(kTotalGroup, all); }));
      }
      if (!cyclist.empty()) {
        r.benefits.push_back(
            in_stage(where, [&] { return aggregate_benefit(kTotalCyclistGroup, cyclist); }));
      }
      if (!pedestrian.empty()) {
        r.benefits.push_back(
            in_stage(where, [&] { return aggregate_benefit(kTotalPedestrianGroup, pedestrian); }));
      }
    }
  }
  return r;
}

}  // namespace

VariantResult run_variant(const PreparedData& data, const RunConfig& config,
                          const Variant& variant) {
  std::vector<Algorithm> algorithms;
  for (const auto& run : data.runs) algorithms.push_back(run.algorithm);
  return run_variant_for(data, config, variant, algorithms);
}

// ---- Extrapolation ---------------------------------------------------------

ExtrapolationResult extrapolate(const VariantResult& assessment,
                                const std::vector<PersonRecord>& indepth,
                                const std::vector<PersonRecord>& target,
                                const TreeParams& tree_params,
                                const DeploymentParams& deployment) {
  deployment.validate();
  ExtrapolationResult out;
  std::set<VruType> types;
  std::vector<Algorithm> algorithms;
  for (const auto& cr : assessment.cases) {
    types.insert(cr.crashes.front().vru_type);
    if (std::find(algorithms.begin(), algorithms.end(), cr.algorithm) == algorithms.end()) {
      algorithms.push_back(cr.algorithm);
    }
  }
  for (VruType type : types) {
    const std::string where = "extrapolate " + std::string(to_string(type));
    const Tree tree = in_stage(where, [&] { return build_tree(persons_of(indepth, type), tree_params); });
    const auto target_counts =
        in_stage(where, [&] { return apply_tree(tree, persons_of(target, type)); });
    const auto factors =
        in_stage(where, [&] { return compute_factors(tree, leaf_counts(tree), target_counts); });

    const InjuryRiskModel& irc = assessment.irc.at(type);
    for (Algorithm alg : algorithms) {
      for (RiskLevel level : kLevels) {
        ExtrapolatedBenefit row;
        row.vru_type = type;
        row.algorithm = alg;
        row.level = level;
        std::map<int, double> point, low, high;
        bool any = false;
        for (const auto& cr : assessment.cases) {
          if (cr.algorithm != alg || cr.crashes.front().vru_type != type) continue;
          any = true;
          const auto& curve = cr.avoidance.curve;
          const auto r_point = per_crash_reduction(cr.crashes, curve, cr.speed, irc, level,
                                                   FrequencyVariant::kPoint);
          const auto r_low = per_crash_reduction(cr.crashes, curve, cr.speed, irc, level,
                                                 FrequencyVariant::kPessimistic);
          const auto r_high = per_crash_reduction(cr.crashes, curve, cr.speed, irc, level,
                                                  FrequencyVariant::kOptimistic);
          for (std::size_t i = 0; i < cr.crashes.size(); ++i) {
            row.indepth += r_point[i];
            row.indepth_low += r_low[i];
            row.indepth_high += r_high[i];
            for (const auto& [leaf, weight] : route_crash(tree, cr.crashes[i], level)) {
              point[leaf] += weight * r_point[i];
              low[leaf] += weight * r_low[i];
              high[leaf] += weight * r_high[i];
            }
          }
        }
        if (!any) continue;
        const std::string cell = where + "/" + std::string(to_string(alg)) + "/" +
                                 std::string(to_string(level));
        in_stage(cell, [&] {
          row.extrapolated = extrapolate_reduction(point, factors, level);
          row.low90 = extrapolate_reduction(low, factors, level);
          row.high90 = extrapolate_reduction(high, factors, level);
          return 0;
        });
        row.scaled = scale_benefit(row.extrapolated, deployment);
        row.scaled_low90 = scale_benefit(row.low90, deployment);
        row.scaled_high90 = scale_benefit(row.high90, deployment);
        out.rows.push_back(row);
      }
    }
    out.trees.emplace(type, tree);
    out.factors.emplace(type, factors);
  }
  return out;
}

Table extrapolated_table(const std::vector<ExtrapolatedBenefit>& rows) {
  Table t;
  t.header = {"vru_type",        "algorithm",     "level",         "indepth_reduction",
              "indepth_low90",   "indepth_high90", "target_reduction", "target_low90",
              "target_high90",   "scaled",        "scaled_low90",  "scaled_high90"};
  for (const auto& r : rows) {
    t.rows.push_back({std::string(to_string(r.vru_type)), std::string(to_string(r.algorithm)),
                      std::string(to_string(r.level)), r.indepth, r.indepth_low, r.indepth_high,
                      r.extrapolated, r.low90, r.high90, r.scaled, r.scaled_low90,
                      r.scaled_high90});
  }
  return t;
}

// ---- Sensitivity -----------------------------------------------------------

std::vector<Variant> sensitivity_variants(const RunConfig& config) {
  std::vector<Variant> out;
  for (double w : config.sensitivity_w) {
    for (IrcFamily family : config.sensitivity_families) {
      for (StatisticalMode mode : config.sensitivity_modes) {
        out.push_back({w, family, mode});
      }
    }
  }
  return out;
}

std::vector<SensitivityCell> sensitivity_sweep(const PreparedData& data, const RunConfig& config) {
  std::vector<SensitivityCell> cells;
  for (const Variant& v : sensitivity_variants(config)) {
    SensitivityCell cell;
    cell.variant = v;
    try {
      const VariantResult r = run_variant_for(data, config, v, {config.sensitivity_algorithm});
      for (const auto& e : r.benefits) {
        if (e.group == kTotalGroup || e.group == kTotalCyclistGroup ||
            e.group == kTotalPedestrianGroup) {
          cell.totals.push_back(e);
        }
      }
    } catch (const Error& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

Table sensitivity_table(const std::vector<SensitivityCell>& cells) {
  Table t;
  t.header = {"level", "group"};
  for (const auto& c : cells) {
    const std::string n = c.variant.name();
    t.header.insert(t.header.end(), {n, n + "_low90", n + "_high90"});
  }
  for (RiskLevel level : kLevels) {
    for (const char* group : {kTotalGroup, kTotalCyclistGroup, kTotalPedestrianGroup}) {
      std::vector<Cell> row = {std::string(to_string(level)), std::string(group)};
      bool present = false;
      for (const auto& c : cells) {
        const auto it = std::find_if(c.totals.begin(), c.totals.end(), [&](const auto& e) {
          return e.level == level && e.group == group;
        });
        if (!c.error.empty()) {
          row.insert(row.end(), {std::string("FAILED"), std::string("FAILED"),
                                 std::string("FAILED")});
        } else if (it == c.totals.end()) {
          row.insert(row.end(), {std::string(), std::string(), std::string()});
        } else {
          present = true;
          row.insert(row.end(), {it->reduction_pct, it->low90, it->high90});
        }
      }
      const bool all_failed = std::all_of(cells.begin(), cells.end(),
                                          [](const auto& c) { return !c.error.empty(); });
      if (present || (all_failed && std::string(group) == kTotalGroup)) t.rows.push_back(row);
    }
  }
  return t;
}

// ---- Commands --------------------------------------------------------------

CommandResult cmd_generate(const RunConfig& config) {
  config.validate();
  CommandResult result;
  result.command = "generate";
  std::filesystem::create_directories(config.out_dir);

  Stopwatch sw;
  const auto crashes = generate_crashes(config);
  const auto crashes_path = config.crashes_path();
  emit_table(crashes_table(crashes), crashes_path);
  result.outputs.push_back(crashes_path);
  result.stages.push_back({"crashes", static_cast<std::int64_t>(crashes.size()), sw.seconds()});

  Stopwatch sw_persons;
  const auto indepth = generate_population(config, PersonPopulation::kInDepth);
  emit_table(persons_table(indepth), config.persons_indepth_path());
  result.outputs.push_back(config.persons_indepth_path());
  const auto target = generate_population(config, PersonPopulation::kTarget);
  emit_table(persons_table(target), config.persons_target_path());
  result.outputs.push_back(config.persons_target_path());
  result.stages.push_back({"persons", static_cast<std::int64_t>(indepth.size() + target.size()),
                           sw_persons.seconds()});
  return result;
}

namespace {

Table outcome_rows(const PreparedData& d) {
  Table t;
  for (const auto& run : d.runs) append_rows(t, outcomes_table(run.outcomes));
  if (t.header.empty()) t = outcomes_table({});
  return t;
}

Table summary_rows(const PreparedData& d) {
  Table t;
  for (const auto& run : d.runs) append_rows(t, summary_table(run.algorithm, run.summary));
  return t;
}

Table monte_carlo_table(const VariantResult& r, const RunConfig& config, int workers) {
  Table t;
  t.header = {"use_case", "algorithm", "level", "e_new", "mc_mean", "mc_std_err", "draws"};
  for (const auto& cr : r.cases) {
    const VruType type = cr.crashes.front().vru_type;
    for (RiskLevel level : kLevels) {
      const std::string label = "mc/" + case_label(cr.use_case, cr.algorithm) + "/" +
                                std::string(to_string(level));
      const double e_new = expected_casualties(
          transformed_frequency(cr.crashes, cr.avoidance.curve, cr.speed), r.irc.at(type), level);
      const MonteCarloResult mc = monte_carlo_benefit(
          cr.crashes, cr.avoidance.curve, cr.speed, r.irc.at(type), level, config.mc_draws,
          derive_seed(config.seed, label), workers);
      t.rows.push_back({std::string(to_string(cr.use_case)),
                        std::string(to_string(cr.algorithm)), std::string(to_string(level)),
                        e_new, mc.mean, mc.std_err, mc.draws});
    }
  }
  return t;
}

std::vector<InjuryRiskModel> irc_list(const VariantResult& r) {
  std::vector<InjuryRiskModel> out;
  for (const auto& [type, m] : r.irc) out.push_back(m);
  return out;
}

std::vector<AvoidanceModel> avoidance_list(const VariantResult& r) {
  std::vector<AvoidanceModel> out;
  for (const auto& cr : r.cases) out.push_back(cr.avoidance);
  return out;
}

}  // namespace

CommandResult cmd_simulate(const RunConfig& config, int workers) {
  config.validate();
  CommandResult result;
  result.command = "simulate";
  Stopwatch sw;
  const auto crashes_path = config.crashes_path();
  const auto crashes = parse_crashes(crashes_path);
  result.inputs.push_back(crashes_path);
  result.stages.push_back({"read_inputs", static_cast<std::int64_t>(crashes.size()), sw.seconds()});

  Stopwatch sw_sim;
  PreparedData d;
  d.runs = simulate_all(crashes, config.algorithms, config.sim, workers);
  std::int64_t n = 0;
  for (const auto& r : d.runs) n += static_cast<std::int64_t>(r.outcomes.size());
  result.stages.push_back({"simulate", n, sw_sim.seconds()});

  std::filesystem::create_directories(config.out_dir);
  write_table(result, config, "outcomes.csv", outcome_rows(d));
  write_table(result, config, "sim_summary.csv", summary_rows(d));
  return result;
}

CommandResult cmd_assess(const RunConfig& config, int workers) {
  CommandResult result;
  result.command = "assess";
  PreparedData d = prepare(config, workers);
  result.inputs = d.inputs;
  result.stages = d.stages;

  Stopwatch sw;
  const VariantResult r = run_variant(d, config, primary_variant(config));
  result.stages.push_back({"assess", static_cast<std::int64_t>(r.benefits.size()), sw.seconds()});

  std::filesystem::create_directories(config.out_dir);
  write_table(result, config, "outcomes.csv", outcome_rows(d));
  write_table(result, config, "sim_summary.csv", summary_rows(d));
  const auto models = avoidance_list(r);
  write_table(result, config, "speed_bins.csv", speed_bins_table(models));
  write_table(result, config, "avoidance_models.csv", avoidance_models_table(models));
  write_table(result, config, "speed_models.csv", speed_models_table(d.speed_models));
  write_table(result, config, "irc_models.csv", irc_models_table(irc_list(r)));
  write_table(result, config, "benefit.csv", benefit_table(r.benefits));

  if (config.mc_draws > 0) {
    Stopwatch sw_mc;
    const Table mc = monte_carlo_table(r, config, workers);
    result.stages.push_back({"monte_carlo", static_cast<std::int64_t>(mc.rows.size()),
                             sw_mc.seconds()});
    write_table(result, config, "monte_carlo.csv", mc);
  }
  return result;
}

CommandResult cmd_extrapolate(const RunConfig& config, int workers) {
  CommandResult result;
  result.command = "extrapolate";
  PreparedData d = prepare(config, workers);
  result.inputs = d.inputs;
  result.stages = d.stages;

  Stopwatch sw;
  const VariantResult r = run_variant(d, config, primary_variant(config));
  result.stages.push_back({"assess", static_cast<std::int64_t>(r.benefits.size()), sw.seconds()});

  Stopwatch sw_read;
  const auto indepth_path = config.persons_indepth_path();
  const auto target_path = config.persons_target_path();
  // The in-depth file is optional for assess but required here.
  const auto indepth = d.persons_indepth.empty() ? parse_persons(indepth_path) : d.persons_indepth;
  if (std::find(result.inputs.begin(), result.inputs.end(), indepth_path) == result.inputs.end()) {
    result.inputs.push_back(indepth_path);
  }
  const auto target = parse_persons(target_path);
  result.inputs.push_back(target_path);
  result.stages.push_back(
      {"read_persons", static_cast<std::int64_t>(indepth.size() + target.size()),
       sw_read.seconds()});

  Stopwatch sw_ex;
  const ExtrapolationResult ex = extrapolate(r, indepth, target, config.tree, config.deployment);
  result.stages.push_back(
      {"extrapolate", static_cast<std::int64_t>(ex.rows.size()), sw_ex.seconds()});

  std::filesystem::create_directories(config.out_dir);
  std::string trees;
  Table factors;
  for (const auto& [type, tree] : ex.trees) {
    if (!trees.empty()) trees += '\n';
    trees += tree_text(tree, std::string(to_string(type)));
    append_rows(factors, factors_table(type, ex.factors.at(type)));
  }
  if (factors.header.empty()) factors = factors_table(VruType::kCyclist, {});
  write_text(result, config, "tree.txt", trees);
  write_table(result, config, "factors.csv", factors);
  write_table(result, config, "extrapolated_benefit.csv", extrapolated_table(ex.rows));
  return result;
}

CommandResult cmd_sensitivity(const RunConfig& config, int workers) {
  CommandResult result;
  result.command = "sensitivity";
  RunConfig c = config;
  c.algorithms = {config.sensitivity_algorithm};
  PreparedData d = prepare(c, workers);
  result.inputs = d.inputs;
  result.stages = d.stages;

  Stopwatch sw;
  const auto cells = sensitivity_sweep(d, c);
  result.stages.push_back({"sensitivity", static_cast<std::int64_t>(cells.size()), sw.seconds()});

  Table errors;
  errors.header = {"variant", "error"};
  for (const auto& cell : cells) {
    if (!cell.error.empty()) errors.rows.push_back({cell.variant.name(), cell.error});
  }
  std::filesystem::create_directories(config.out_dir);
  write_table(result, config, "sensitivity.csv", sensitivity_table(cells));
  write_table(result, config, "sensitivity_errors.csv", errors);
  return result;
}

namespace {

std::string render_document(const CsvDocument& doc) {
  std::vector<std::size_t> width(doc.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  };
  widen(doc.header);
  for (const auto& row : doc.rows) widen(row);
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      if (i) out << "  ";
      out << row[i];
      if (i + 1 < row.size()) out << std::string(width[i] - row[i].size(), ' ');
    }
    out << '\n';
  };
  line(doc.header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& row : doc.rows) line(row);
  return out.str();
}

// Reduction with its interval per use case and algorithm, one block per level.
std::string render_benefit(const CsvDocument& doc) {
  require_header(doc.header,
                 "use_case,algorithm,level,e_orig,e_new,reduction_pct,low90,high90",
                 "benefit.csv");
  CsvDocument view;
  view.header = {"level", "algorithm", "group", "e_orig", "e_new", "reduction_%", "90% interval"};
  for (const auto& r : doc.rows) {
    if (r.size() < 8) continue;
    view.rows.push_back({r[2], r[1], r[0], r[3], r[4], r[5], "[" + r[6] + ", " + r[7] + "]"});
  }
  return render_document(view);
}

}  // namespace

CommandResult cmd_report(const RunConfig& config) {
  CommandResult result;
  result.command = "report";
  Stopwatch sw;
  std::ostringstream out;
  out << "vru-benefit " << version() << " report\n\n";

  const auto benefit_path = config.output("benefit.csv");
  const CsvDocument benefit = read_csv(benefit_path);
  result.inputs.push_back(benefit_path);
  out << "Casualty reduction by use case (benefit.csv)\n\n" << render_benefit(benefit);
  std::int64_t rows = static_cast<std::int64_t>(benefit.rows.size());

  const std::array<std::pair<const char*, const char*>, 3> optional = {{
      {"sensitivity.csv", "Sensitivity of the total reduction (sensitivity.csv)"},
      {"extrapolated_benefit.csv", "Extrapolated and scaled benefit (extrapolated_benefit.csv)"},
      {"factors.csv", "Extrapolation factors (factors.csv)"},
  }};
  for (const auto& [file, title] : optional) {
    const auto path = config.output(file);
    if (!std::filesystem::exists(path)) continue;
    const CsvDocument doc = read_csv(path);
    result.inputs.push_back(path);
    rows += static_cast<std::int64_t>(doc.rows.size());
    out << '\n' << title << "\n\n" << render_document(doc);
  }
  result.text = out.str();
  result.stages.push_back({"report", rows, sw.seconds()});
  write_text(result, config, "report.txt", result.text);
  return result;
}

}  // namespace vru
