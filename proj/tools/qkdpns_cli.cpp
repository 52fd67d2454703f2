// qkdpns: weak-pulse QKD rates, PNS thresholds, attack curves and sessions.

#include "qkdpns/bench.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace qkdpns::bench;

struct Options {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config_path, "flat JSON config file");
  cmd->add_option("--out", opts.out, "output path");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--set", opts.overrides, "override a config key (key=value)")
      ->take_all();
}

RunConfig resolve(const Options& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) config = load_config_file(opts.config_path);
  for (const auto& assignment : opts.overrides) apply_override(config, assignment);
  if (!opts.out.empty()) config.out = opts.out;
  if (opts.seed) config.seed = *opts.seed;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number-splitting analysis for weak-pulse BB84 and SARG sifting"};
  app.require_subcommand(1);

  Options opts;
  using Command = int (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"rates", "Poisson table and raw detection rates", cmd_rates},
      {"critical", "critical attenuations, delta_1 and the 67 km scenario", cmd_critical},
      {"sweep", "Eve's optimal information vs attenuation as CSV", cmd_sweep},
      {"session", "Monte Carlo key distribution without Eve", cmd_session},
      {"povm-verify", "check the 3-photon unambiguous discrimination POVM", cmd_povm_verify},
  };
  std::vector<std::pair<CLI::App*, Command>> registered;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, opts);
    registered.emplace_back(cmd, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    const RunConfig config = resolve(opts);
    for (const auto& [cmd, fn] : registered)
      if (cmd->parsed()) return fn(config, std::cout);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitIo;
}
