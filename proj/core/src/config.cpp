#include "vru/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "vru/csv.hpp"
#include "vru/error.hpp"

namespace vru {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value);
  }
  return out;
}

template <class E>
E parse_choice(std::string_view key, std::string_view value) {
  if (auto e = parse_enum<E>(trim(value))) return *e;
  bad_value(key, value);
}

template <class E>
std::vector<E> parse_choices(std::string_view key, std::string_view value) {
  std::vector<E> out;
  for (const auto& item : split_list(value)) out.push_back(parse_choice<E>(key, item));
  if (out.empty()) bad_value(key, value);
  return out;
}

template <class E>
std::string join_names(const std::vector<E>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += to_string(v);
  }
  return out;
}

}  // namespace

std::map<UseCase, int> default_crash_counts() {
  return {{UseCase::kUC1, 132},  {UseCase::kUC2, 144},  {UseCase::kUC3, 245},
          {UseCase::kUC4, 217},  {UseCase::kUC5, 498},  {UseCase::kUC6, 105},
          {UseCase::kUC9, 21},   {UseCase::kUC10, 344}, {UseCase::kUC11, 217},
          {UseCase::kUC12, 20}};
}

std::string format_exact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void RunConfig::validate() const {
  if (!(w >= 0.0)) throw ConfigError("w must be >= 0");
  if (!(quantiles.low > 0.0 && quantiles.low < 0.5 && quantiles.high > 0.5 &&
        quantiles.high < 1.0)) {
    throw ConfigError("quantiles must satisfy 0 < low < 0.5 < high < 1");
  }
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  for (double sw : sensitivity_w) {
    if (!(sw >= 0.0)) throw ConfigError("sensitivity.w_values must be >= 0");
  }
  for (const auto& [uc, n] : crash_counts) {
    if (n < 0) throw ConfigError("negative crash count for " + std::string(to_string(uc)));
  }
  if (persons_indepth_count < 0 || persons_target_count < 0) {
    throw ConfigError("person counts must be >= 0");
  }
  if (mc_draws < 0) throw ConfigError("mc.draws must be >= 0");
  deployment.validate();
  sim.validate();
}

std::filesystem::path RunConfig::crashes_path() const {
  return crashes.empty() ? output("crashes.csv") : crashes;
}
std::filesystem::path RunConfig::persons_indepth_path() const {
  return persons_indepth.empty() ? output("persons_indepth.csv") : persons_indepth;
}
std::filesystem::path RunConfig::persons_target_path() const {
  return persons_target.empty() ? output("persons_target.csv") : persons_target;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key.starts_with("sim.")) {
    if (!set_sim_config_value(c.sim, key.substr(4), value)) {
      throw ConfigError("unknown key '" + std::string(key) + "'");
    }
    return;
  }
  if (key.starts_with("count.")) {
    const auto uc = parse_use_case(key.substr(6));
    if (!uc) throw ConfigError("unknown key '" + std::string(key) + "'");
    c.crash_counts[*uc] = parse_number<int>(key, value);
    return;
  }
  if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "w") {
    c.w = parse_number<double>(key, value);
  } else if (key == "quantile_low") {
    c.quantiles.low = parse_number<double>(key, value);
  } else if (key == "quantile_high") {
    c.quantiles.high = parse_number<double>(key, value);
  } else if (key == "algorithms") {
    c.algorithms = parse_choices<Algorithm>(key, value);
  } else if (key == "irc_family") {
    c.irc_family = parse_choice<IrcFamily>(key, value);
  } else if (key == "statistical_mode") {
    c.statistical_mode = parse_choice<StatisticalMode>(key, value);
  } else if (key == "curve_form") {
    if (iequals(value, "auto")) {
      c.curve_form.reset();
    } else {
      c.curve_form = parse_choice<CurveForm>(key, value);
    }
  } else if (key == "irc_source") {
    c.irc_source = parse_choice<IrcSource>(key, value);
  } else if (key == "market_penetration") {
    c.deployment.market_penetration = parse_number<double>(key, value);
  } else if (key == "user_acceptance") {
    c.deployment.user_acceptance = parse_number<double>(key, value);
  } else if (key == "tree.max_depth") {
    c.tree.max_depth = parse_number<int>(key, value);
  } else if (key == "tree.min_leaf") {
    c.tree.min_leaf = parse_number<int>(key, value);
  } else if (key == "out") {
    c.out_dir = std::string(value);
  } else if (key == "crashes") {
    c.crashes = std::string(value);
  } else if (key == "tests") {
    c.tests = std::string(value);
  } else if (key == "outcomes") {
    c.outcomes = std::string(value);
  } else if (key == "persons_indepth") {
    c.persons_indepth = std::string(value);
  } else if (key == "persons_target") {
    c.persons_target = std::string(value);
  } else if (key == "persons.indepth_count") {
    c.persons_indepth_count = parse_number<int>(key, value);
  } else if (key == "persons.target_count") {
    c.persons_target_count = parse_number<int>(key, value);
  } else if (key == "sensitivity.w_values") {
    c.sensitivity_w.clear();
    for (const auto& item : split_list(value)) {
      c.sensitivity_w.push_back(parse_number<double>(key, item));
    }
    if (c.sensitivity_w.empty()) bad_value(key, value);
  } else if (key == "sensitivity.irc_families") {
    c.sensitivity_families = parse_choices<IrcFamily>(key, value);
  } else if (key == "sensitivity.modes") {
    c.sensitivity_modes = parse_choices<StatisticalMode>(key, value);
  } else if (key == "sensitivity.algorithm") {
    c.sensitivity_algorithm = parse_choice<Algorithm>(key, value);
  } else if (key == "mc.draws") {
    c.mc_draws = parse_number<std::int64_t>(key, value);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
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
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  return parse_run_config(text, std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"seed", std::to_string(c.seed)},
      {"w", format_exact(c.w)},
      {"quantile_low", format_exact(c.quantiles.low)},
      {"quantile_high", format_exact(c.quantiles.high)},
      {"algorithms", join_names(c.algorithms)},
      {"irc_family", std::string(to_string(c.irc_family))},
      {"statistical_mode", std::string(to_string(c.statistical_mode))},
      {"curve_form", c.curve_form ? std::string(to_string(*c.curve_form)) : "auto"},
      {"irc_source", std::string(to_string(c.irc_source))},
      {"market_penetration", format_exact(c.deployment.market_penetration)},
      {"user_acceptance", format_exact(c.deployment.user_acceptance)},
      {"tree.max_depth", std::to_string(c.tree.max_depth)},
      {"tree.min_leaf", std::to_string(c.tree.min_leaf)},
      {"out", c.out_dir.string()},
      {"crashes", c.crashes.string()},
      {"tests", c.tests.string()},
      {"outcomes", c.outcomes.string()},
      {"persons_indepth", c.persons_indepth.string()},
      {"persons_target", c.persons_target.string()},
      {"persons.indepth_count", std::to_string(c.persons_indepth_count)},
      {"persons.target_count", std::to_string(c.persons_target_count)},
  };
  {
    std::string ws;
    for (double w : c.sensitivity_w) ws += (ws.empty() ? "" : ",") + format_exact(w);
    out.emplace_back("sensitivity.w_values", ws);
  }
  out.emplace_back("sensitivity.irc_families", join_names(c.sensitivity_families));
  out.emplace_back("sensitivity.modes", join_names(c.sensitivity_modes));
  out.emplace_back("sensitivity.algorithm", std::string(to_string(c.sensitivity_algorithm)));
  out.emplace_back("mc.draws", std::to_string(c.mc_draws));
  for (const auto& [uc, n] : c.crash_counts) {
    out.emplace_back("count." + std::string(to_string(uc)), std::to_string(n));
  }
  const std::string sim = to_text(c.sim);
  std::string_view rest = sim;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace_back("sim." + std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace vru
