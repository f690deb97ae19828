#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "aclab/config.hpp"
#include "aclab/error.hpp"
#include "aclab/harness.hpp"
#include "aclab/io.hpp"
#include "doctest.h"

using namespace aclab;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::NumericFailure;
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aclab_unit_" + name);
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse(
      "top = 1\n"
      "# comment\n"
      "[separation-law]\n"
      "eps = [0.1, 0.05]  # trailing\n"
      "spread = 1.25\n"
      "well = \"sextic:0.5\"\n"
      "quiet = true\n"
      "metrics = [\"flat\", \"synthetic:1\"]\n");
  CHECK(c.number("", "top").value() == 1.0);
  CHECK(c.numbers("separation-law", "eps").value() == std::vector<double>{0.1, 0.05});
  CHECK(c.number("separation-law", "spread").value() == 1.25);
  CHECK(c.string("separation-law", "well").value() == "sextic:0.5");
  CHECK(c.boolean("separation-law", "quiet").value());
  CHECK(c.strings("separation-law", "metrics").value().size() == 2);
  CHECK(c.numbers("separation-law", "spread").value() == std::vector<double>{1.25});
  CHECK_FALSE(c.number("separation-law", "absent").has_value());
  CHECK(kind_of([&] { c.number("separation-law", "well"); }) == ErrorKind::ConfigError);
}

TEST_CASE("config errors carry the line") {
  for (const char* bad : {"[t]\nx = 1\nx = 2\n", "[t]\ny = \"open\n", "[t]\nz = [1, 2\n", "[t\n", "[t]\n= 3\n"}) {
    try {
      Config::parse(bad);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigError);
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
}

TEST_CASE("csv round trip is exact") {
  CsvTable t{{"a", "b"}, {}};
  t.add({0.1, 1.0 / 3.0});
  t.add({-2.5e-300, std::nan("")});
  const CsvTable r = parse_csv(to_csv(t));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.header == t.header);
  CHECK(r.rows[0] == t.rows[0]);
  CHECK(r.rows[1][0] == t.rows[1][0]);
  CHECK(std::isnan(r.rows[1][1]));
  CHECK(r.column("b")[0] == 1.0 / 3.0);
  CHECK(kind_of([&] { r.column("c"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_csv(""); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_csv("a,b\n1\n"); }) == ErrorKind::ConfigError);
}

TEST_CASE("registry covers every criterion once") {
  const auto& reg = registry();
  CHECK(reg.size() >= 11);
  std::set<std::string> names;
  for (const auto& e : reg) names.insert(e.name);
  CHECK(names.size() == reg.size());
  for (int k = 1; k <= 11; ++k) {
    int n = 0;
    for (const auto& e : reg) n += e.criterion == k;
    CHECK(n == 1);
    CHECK(experiment_for_criterion(k).criterion == k);
  }
  CHECK(kind_of([] { find_experiment("no-such-experiment"); }) == ErrorKind::ConfigError);
}

TEST_CASE("exit codes") {
  RunOptions opt;
  opt.out_root = scratch("exit");
  opt.quiet = true;
  CHECK(run_experiment("no-such-experiment", opt).exit_code == kExitConfig);
  opt.eps = {0.05, 0.1};
  CHECK(run_experiment("separation-law", opt).exit_code == kExitConfig);
  CHECK(kind_of([] { parse_eps_list("0.1,x"); }) == ErrorKind::ConfigError);
  CHECK(parse_eps_list("0.1,0.05") == std::vector<double>{0.1, 0.05});

  std::vector<RunReport> rs(3);
  rs[0].exit_code = kExitPass;
  rs[1].exit_code = kExitFail;
  rs[2].exit_code = kExitNumeric;
  CHECK(combine_exit_codes(rs) == kExitNumeric);
  rs[0].exit_code = kExitConfig;
  CHECK(combine_exit_codes(rs) == kExitConfig);
  CHECK(combine_exit_codes({rs[1]}) == kExitFail);
  fs::remove_all(opt.out_root);
}

TEST_CASE("output root honours the environment") {
  RunOptions opt;
  opt.out_root = "somewhere";
  ::unsetenv("AC_LAB_OUT");
  CHECK(output_root(opt) == "somewhere");
  ::setenv("AC_LAB_OUT", "/tmp/elsewhere", 1);
  CHECK(output_root(opt) == "/tmp/elsewhere");
  ::unsetenv("AC_LAB_OUT");
}

TEST_CASE("fast experiments pass and are deterministic") {
  RunOptions opt;
  opt.quiet = true;
  opt.out_root = scratch("a");
  const std::vector<std::string> fast{"heteroclinic-constants", "interaction-asymptotics", "corrector-identities",
                                      "separation-law", "geometry-kernel", "truncation-defect"};
  opt.jobs = 3;
  const auto a = run_many(fast, opt);
  for (const auto& r : a) {
    INFO(r.name << ": " << r.error);
    CHECK(r.exit_code == kExitPass);
    CHECK(fs::exists(fs::path(opt.out_root) / r.name / "report.json"));
  }
  RunOptions again = opt;
  again.out_root = scratch("b");
  again.jobs = 1;
  run_many({"separation-law", "geometry-kernel"}, again);
  for (const char* f : {"separation-law/separation.csv", "geometry-kernel/geometry.csv"})
    CHECK(read_text((fs::path(opt.out_root) / f).string()) == read_text((fs::path(again.out_root) / f).string()));
  const nlohmann::json rep = read_json((fs::path(opt.out_root) / "separation-law" / "report.json").string());
  CHECK(rep.contains("checks"));
  fs::remove_all(opt.out_root);
  fs::remove_all(again.out_root);
}
