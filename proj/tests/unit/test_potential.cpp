#include <cmath>
#include <random>

#include "aclab/error.hpp"
#include "aclab/potential.hpp"
#include "doctest.h"

using namespace aclab;

TEST_CASE("standard well values and derivatives") {
  const DoubleWell w = standard_well();
  CHECK(w.eval(0, 0.0) == doctest::Approx(0.25));
  CHECK(w.eval(1, 0.5) == doctest::Approx(-0.375));
  CHECK(w.eval(2, 1.0) == doctest::Approx(2.0));
  CHECK(w.eval(2, -1.0) == doctest::Approx(2.0));
  CHECK(w.eval(3, 1.0) == doctest::Approx(6.0));
  CHECK(w.eval(0, 1.0) == 0.0);
  CHECK_THROWS_AS(eval_w(w, 4, 0.0), Error);
}

TEST_CASE("wells are even and nonnegative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (const DoubleWell& w : {standard_well(), sextic_well(0.5)}) {
    for (int k = 0; k < 200; ++k) {
      const double t = U(rng);
      CHECK(w.eval(0, t) >= 0.0);
      CHECK(std::abs(w.eval(0, t) - w.eval(0, -t)) <= 1e-15);
      CHECK(std::abs(w.eval(1, t) + w.eval(1, -t)) <= 1e-14);
    }
    CHECK(check_well(w).ok);
  }
}

TEST_CASE("a well with the wrong curvature at the minima is rejected") {
  DoubleWell bad;
  bad.label = "steep";
  bad.eval = [](int k, double t) {
    const DoubleWell s = standard_well();
    return 2.0 * s.eval(k, t);
  };
  CHECK_FALSE(check_well(bad).ok);
  CHECK_THROWS_AS(validate_well(bad), Error);
}

TEST_CASE("well ids") {
  CHECK(well_from_id("standard").is_standard);
  CHECK_NOTHROW(well_from_id("sextic:0.5"));
  try {
    well_from_id("quartic-ish");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
}

TEST_CASE("h0 by quadrature") {
  CHECK(std::abs(h0_quadrature(standard_well(), 1e-13) - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-12);
  // mpmath oracle: tools/oracles/heteroclinic_oracles.py
  CHECK(std::abs(h0_quadrature(sextic_well(0.5), 1e-13) - 1.1146883672345796584) <= 1e-10);
}

TEST_CASE("sextic well constants against frozen values") {
  const WellConstants c = well_constants(sextic_well(0.5), 1e-12);
  CHECK(std::abs(c.h0 - 1.1146883672345796584) <= 1e-9);
  CHECK(std::abs(c.A0 - 4.0 / 3.0) <= 1e-6);
  CHECK(std::abs(c.A0_minus - 4.0 / 3.0) <= 1e-6);
}
