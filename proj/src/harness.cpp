#include "aclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "aclab/error.hpp"
#include "aclab/io.hpp"

namespace aclab {

ExperimentRun::ExperimentRun(std::string name, const RunOptions& opt, std::string dir)
    : name_(std::move(name)), opt_(opt), dir_(std::move(dir)) {}

std::vector<double> ExperimentRun::eps_list(const std::vector<double>& fallback) const {
  std::vector<double> e = fallback;
  if (!opt_.eps.empty()) e = opt_.eps;
  else if (auto v = opt_.config.numbers(name_, "eps")) e = *v;
  if (e.empty()) fail(ErrorKind::ConfigError, name_ + ": empty eps list");
  for (size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] > 0.0 && e[i] < 1.0)) fail(ErrorKind::ConfigError, name_ + ": eps values must lie in (0, 1)");
    if (i > 0 && !(e[i] < e[i - 1])) fail(ErrorKind::ConfigError, name_ + ": eps list must be strictly descending");
  }
  return e;
}

double ExperimentRun::number(const std::string& key, double fallback) const {
  return opt_.config.number(name_, key).value_or(fallback);
}

std::string ExperimentRun::string(const std::string& key, const std::string& fallback) const {
  return opt_.config.string(name_, key).value_or(fallback);
}

std::vector<std::string> ExperimentRun::strings(const std::string& key,
                                                const std::vector<std::string>& fallback) const {
  return opt_.config.strings(name_, key).value_or(fallback);
}

void ExperimentRun::check(const std::string& name, bool pass, double value, double threshold,
                          const std::string& detail) {
  checks_.push_back({name, pass, value, threshold, detail});
}

std::string ExperimentRun::artifact(const std::string& file) {
  artifacts_.push_back(file);
  return (std::filesystem::path(dir_) / file).string();
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> reg = [] {
    std::vector<Experiment> r;
    register_1d(r);
    register_pde(r);
    register_barrier(r);
    return r;
  }();
  return reg;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  fail(ErrorKind::ConfigError, "unknown experiment '" + name + "'");
}

const Experiment& experiment_for_criterion(int criterion) {
  for (const auto& e : registry())
    if (e.criterion == criterion) return e;
  fail(ErrorKind::ConfigError, "no experiment for criterion " + std::to_string(criterion));
}

std::string output_root(const RunOptions& opt) {
  const char* env = std::getenv("AC_LAB_OUT");
  return env && *env ? std::string(env) : opt.out_root;
}

namespace {

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument: return kExitConfig;
    default: return kExitNumeric;
  }
}

}  // namespace

nlohmann::json report_json(const RunReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["criterion"] = r.criterion;
  j["pass"] = r.pass;
  j["exit_code"] = r.exit_code;
  j["seconds"] = r.seconds;
  if (!r.error.empty()) j["error"] = r.error;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  j["artifacts"] = r.artifacts;
  j["metrics"] = r.metrics;
  return j;
}

std::string summary_line(const RunReport& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
  if (r.criterion) s << " (criterion " << r.criterion << ")";
  char t[32];
  std::snprintf(t, sizeof t, "  %.1fs", r.seconds);
  s << t;
  if (!r.error.empty()) s << "  " << r.error;
  for (const auto& c : r.checks)
    if (!c.pass) s << "\n    failed: " << c.name << " value " << format_double(c.value) << " threshold "
                   << format_double(c.threshold) << (c.detail.empty() ? "" : " (" + c.detail + ")");
  return s.str();
}

RunReport run_experiment(const std::string& name, const RunOptions& opt) {
  RunReport rep;
  rep.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  const Experiment* e = nullptr;
  try {
    e = &find_experiment(name);
  } catch (const Error& err) {
    rep.exit_code = kExitConfig;
    rep.error = err.what();
    return rep;
  }
  rep.criterion = e->criterion;
  const std::string dir = (std::filesystem::path(output_root(opt)) / name).string();
  ExperimentRun run(name, opt, dir);
  try {
    ensure_dir(dir);
    e->body(run);
    rep.pass = !run.checks().empty();
    for (const auto& c : run.checks()) rep.pass = rep.pass && c.pass;
    rep.exit_code = rep.pass ? kExitPass : kExitFail;
  } catch (const Error& err) {
    rep.exit_code = exit_code_for(err.kind());
    rep.error = err.what();
  } catch (const std::exception& err) {
    rep.exit_code = kExitNumeric;
    rep.error = err.what();
  }
  rep.checks = run.checks();
  rep.artifacts = run.artifacts();
  rep.metrics = run.metrics();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_json((std::filesystem::path(dir) / "report.json").string(), report_json(rep));
  } catch (const Error& err) {
    if (rep.exit_code == kExitPass) rep.exit_code = kExitConfig;
    if (rep.error.empty()) rep.error = err.what();
    rep.pass = false;
  }
  return rep;
}

std::vector<RunReport> run_many(const std::vector<std::string>& names, const RunOptions& opt) {
  std::vector<RunReport> out(names.size());
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(names.size())));
  std::atomic<size_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (size_t i = next++; i < names.size(); i = next++) {
      out[i] = run_experiment(names[i], opt);
      if (!opt.quiet) {
        std::lock_guard<std::mutex> lock(print);
        std::printf("%s\n", summary_line(out[i]).c_str());
        std::fflush(stdout);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

int combine_exit_codes(const std::vector<RunReport>& reports) {
  int code = kExitPass;
  auto rank = [](int c) { return c == kExitConfig ? 3 : c == kExitNumeric ? 2 : c == kExitFail ? 1 : 0; };
  for (const auto& r : reports)
    if (rank(r.exit_code) > rank(code)) code = r.exit_code;
  return code;
}

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "bad eps value '" + item + "'");
    }
  }
  if (out.empty()) fail(ErrorKind::ConfigError, "empty eps list");
  return out;
}

}  // namespace aclab
