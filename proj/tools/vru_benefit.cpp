#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "vru/config.hpp"
#include "vru/error.hpp"
#include "vru/pipeline.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> w;
  std::optional<std::string> out;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key=value configuration file");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--w", o.w, "test-result weight");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.settings, "override, key=value (repeatable)");
}

vru::RunConfig resolve(const Options& o) {
  vru::RunConfig c;
  if (!o.config_path.empty()) c = vru::load_run_config(o.config_path, c);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw vru::ConfigError("--set expects key=value, got '" + s + "'");
    vru::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.w) c.w = *o.w;
  if (o.out) c.out_dir = *o.out;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prospective safety-benefit assessment for AEB/steering systems"};
  app.set_version_flag("--version", std::string(vru::version()));
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"generate", "write synthetic crashes and person records"},
      {"simulate", "run counterfactual simulations"},
      {"assess", "posterior benefit per use case and algorithm"},
      {"extrapolate", "tree-based extrapolation and deployment scaling"},
      {"sensitivity", "sweep over w, injury model family and statistical mode"},
      {"report", "plain-text summary of existing outputs"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : vru::exit_code(vru::ErrorKind::kConfig);
  }

  try {
    const vru::RunConfig config = resolve(opts);
    const int workers = vru::default_workers();
    const std::string cmd = app.get_subcommands().front()->get_name();
    vru::CommandResult result;
    if (cmd == "generate") {
      result = vru::cmd_generate(config);
    } else if (cmd == "simulate") {
      result = vru::cmd_simulate(config, workers);
    } else if (cmd == "assess") {
      result = vru::cmd_assess(config, workers);
    } else if (cmd == "extrapolate") {
      result = vru::cmd_extrapolate(config, workers);
    } else if (cmd == "sensitivity") {
      result = vru::cmd_sensitivity(config, workers);
    } else {
      result = vru::cmd_report(config);
      std::cout << result.text;
    }
    const auto manifest = vru::tools::write_manifest(config, result);
    for (const auto& p : result.outputs) std::cerr << "wrote " << p.generic_string() << '\n';
    std::cerr << "wrote " << manifest.generic_string() << '\n';
    return 0;
  } catch (const vru::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vru::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
