// Runs the experiment behind each acceptance criterion and prints one line per criterion.
#include <algorithm>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "aclab/harness.hpp"

using namespace aclab;

int main(int argc, char** argv) {
  RunOptions opt;
  opt.out_root = argc > 1 ? argv[1] : "acceptance_out";
  opt.quiet = true;
  opt.jobs = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
  std::vector<std::string> names;
  for (int k = 1; k <= 11; ++k) names.push_back(experiment_for_criterion(k).name);
  const auto reports = run_many(names, opt);
  int failed = 0;
  for (int k = 1; k <= 11; ++k) {
    const RunReport& r = reports[k - 1];
    std::printf("criterion %2d: %s  %-24s %7.1f s\n", k, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    if (r.pass) continue;
    ++failed;
    if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
    for (const auto& c : r.checks)
      if (!c.pass) std::printf("    failed check: %s (value %.6g, threshold %.6g)\n", c.name.c_str(), c.value, c.threshold);
  }
  std::printf("%d of 11 criteria pass; reports under %s\n", 11 - failed, output_root(opt).c_str());
  return failed == 0 ? 0 : 1;
}
