#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aclab/config.hpp"
#include "json.hpp"

namespace aclab {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitNumeric = 3 };

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunOptions {
  std::vector<double> eps;  // empty: experiment defaults
  std::string out_root = "out";
  std::uint64_t seed = 1;
  Config config;
  int jobs = 1;
  bool quiet = false;
};

// What an experiment sees while running: parameters, its output directory and a check recorder.
class ExperimentRun {
 public:
  ExperimentRun(std::string name, const RunOptions& opt, std::string dir);

  const std::string& name() const { return name_; }
  const std::string& dir() const { return dir_; }
  std::uint64_t seed() const { return opt_.seed; }

  // --eps overrides, then [name] eps in the config, then the fallback; must be strictly descending.
  std::vector<double> eps_list(const std::vector<double>& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) const;

  // Records a criterion; value <= threshold style checks are expressed by the caller through pass.
  void check(const std::string& name, bool pass, double value, double threshold, const std::string& detail = "");
  // Relative path under the experiment directory; the artifact is listed in the report.
  std::string artifact(const std::string& file);
  nlohmann::json& metrics() { return metrics_; }

  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  std::string name_;
  const RunOptions& opt_;
  std::string dir_;
  std::vector<Check> checks_;
  std::vector<std::string> artifacts_;
  nlohmann::json metrics_ = nlohmann::json::object();
};

struct Experiment {
  std::string name;
  std::string description;
  int criterion = 0;  // acceptance criterion number, 0 for auxiliary experiments
  std::function<void(ExperimentRun&)> body;
};

struct RunReport {
  std::string name;
  int criterion = 0;
  int exit_code = kExitPass;
  bool pass = false;
  double seconds = 0.0;
  std::string error;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  nlohmann::json metrics;
};

// Registry in a fixed order; names are stable.
const std::vector<Experiment>& registry();
// Throws config-error for unknown names.
const Experiment& find_experiment(const std::string& name);
const Experiment& experiment_for_criterion(int criterion);

// Output root: AC_LAB_OUT when set, otherwise the option.
std::string output_root(const RunOptions& opt);

// Runs one experiment, maps errors to exit codes and writes <root>/<name>/report.json.
RunReport run_experiment(const std::string& name, const RunOptions& opt);
// Runs several experiments on up to opt.jobs threads; reports come back in input order.
std::vector<RunReport> run_many(const std::vector<std::string>& names, const RunOptions& opt);
// Worst exit code: config error, then numeric failure, then criterion failure.
int combine_exit_codes(const std::vector<RunReport>& reports);

nlohmann::json report_json(const RunReport& r);
std::string summary_line(const RunReport& r);

// Comma-separated list of numbers; throws config-error.
std::vector<double> parse_eps_list(const std::string& s);

// Registration hooks of the experiment groups.
void register_1d(std::vector<Experiment>& out);
void register_pde(std::vector<Experiment>& out);
void register_barrier(std::vector<Experiment>& out);

}  // namespace aclab
