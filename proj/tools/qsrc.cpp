// qsrc holevo|binary-smin|rd-sweep|props|protocol --config <path> --out <path>
//      [--seed <u64>] [--threads <n>]
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qsrc/cli/commands.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

int run(const std::string& name, const Options& opt) {
  using namespace qsrc::cli;
  try {
    ExperimentConfig cfg = load_config(opt.config);
    if (to_string(cfg.kind) != name)
      throw ConfigError(opt.config + ": at /kind: configuration is for \"" + to_string(cfg.kind) +
                        "\" but the command is \"" + name + "\"");
    apply_overrides(cfg, opt.seed, opt.threads, std::getenv("QSRC_DENSE_CAP"));
    const CommandResult result = run_command(cfg);
    std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "qsrc: cannot write " << opt.out << "\n";
      return kExitOther;
    }
    out << result.csv;
    out.close();
    if (result.exit_code != kExitOk) std::cerr << "qsrc " << name << ": " << result.message << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "qsrc: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qsrc::ResourceCapError& e) {
    std::cerr << "qsrc: resource cap: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "qsrc: error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum source compression experiments"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"holevo", "binary-smin", "rd-sweep", "props", "protocol"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "experiment configuration (JSON)")->required();
    sub->add_option("--out", opt.out, "CSV report path")->required();
    sub->add_option("--seed", opt.seed, "master seed, overrides the configuration");
    sub->add_option("--threads", opt.threads, "worker threads");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsrc::cli::kExitConfig;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
