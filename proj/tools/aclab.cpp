#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aclab/error.hpp"
#include "aclab/harness.hpp"

using namespace aclab;

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn and minimal surface numerical lab"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string eps_text, config_path;
  std::vector<std::string> names;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--eps", eps_text, "comma-separated eps list, strictly descending");
    sub->add_option("--config", config_path, "TOML parameter file");
    sub->add_option("--out", opt.out_root, "output root (AC_LAB_OUT overrides)");
    sub->add_option("--jobs", opt.jobs, "experiments run in parallel")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "random seed");
  };
  CLI::App* run = app.add_subcommand("run", "run experiments by name");
  run->add_option("names", names, "experiment names")->required();
  common(run);
  CLI::App* all = app.add_subcommand("all", "run every registered experiment");
  common(all);
  app.add_subcommand("list", "list registered experiments");
  std::string describe_name;
  CLI::App* describe = app.add_subcommand("describe", "describe one experiment");
  describe->add_option("name", describe_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& e : registry())
        std::printf("%-26s %s%s\n", e.name.c_str(), e.description.c_str(),
                    e.criterion ? (" [criterion " + std::to_string(e.criterion) + "]").c_str() : "");
      return kExitPass;
    }
    if (app.got_subcommand("describe")) {
      const Experiment& e = find_experiment(describe_name);
      std::printf("%s\n  %s\n  criterion: %s\n", e.name.c_str(), e.description.c_str(),
                  e.criterion ? std::to_string(e.criterion).c_str() : "none (auxiliary)");
      return kExitPass;
    }
    if (!eps_text.empty()) opt.eps = parse_eps_list(eps_text);
    if (!config_path.empty()) opt.config = Config::load(config_path);
    if (app.got_subcommand("all")) {
      names.clear();
      for (const auto& e : registry()) names.push_back(e.name);
      if (!opt.eps.empty()) std::fprintf(stderr, "note: --eps applies to every experiment\n");
    }
    const auto reports = run_many(names, opt);
    return combine_exit_codes(reports);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InvalidArgument ? kExitConfig : kExitNumeric;
  }
}
