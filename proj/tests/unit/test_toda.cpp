#include <cmath>

#include "aclab/error.hpp"
#include "aclab/geometry.hpp"
#include "aclab/toda.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kH0 = 2.0 * kSqrt2 / 3.0;
const double kK = 16.0 / kH0;

}  // namespace

TEST_CASE("scalar gap against the Lambert W oracle") {
  // tools/oracles/barrier_oracles.py scalar_gap(lambda = 1, K = 16/h0)
  const double eps[4] = {0.1, 0.05, 0.025, 0.0125};
  const double D[4] = {0.46603358045530436534, 0.27603934043382331662, 0.15992234231043366671,
                       0.091065057625957715335};
  for (int k = 0; k < 4; ++k) {
    const double g = scalar_gap(eps[k], 1.0, kK);
    CHECK(std::abs(g - D[k]) <= 1e-12);
    CHECK(std::abs(eps[k] * g - 2.0 * kK * std::exp(-kSqrt2 * g / eps[k])) <= 1e-13);
  }
}

TEST_CASE("separation model and boundary gap closed forms") {
  for (double e : {0.1, 0.03, 0.01}) {
    const double L = std::abs(std::log(e));
    CHECK(std::abs(separation_model(e) - (kSqrt2 * e * L - e * std::log(L) / kSqrt2)) <= 1e-15);
    CHECK(std::abs(std::exp(-kSqrt2 * boundary_gap(e, 0.05) / e) / (0.05 * e * e) - 1.0) <= 1e-12);
  }
}

TEST_CASE("doubling a constant potential narrows the gap") {
  for (double e : {0.1, 0.05, 0.025}) {
    const double D = scalar_gap(e, 1.0, kK), D2 = scalar_gap(e, 2.0, kK);
    CHECK(D2 < D);
    CHECK(std::abs((D - D2) - e / kSqrt2 * (std::log(2.0) + std::log(D2 / D))) <= 1e-13);
  }
}

TEST_CASE("separation law rows are consistent") {
  const SeparationLaw law = separation_law(1.0, {0.1, 0.05, 0.025, 0.0125}, kK);
  REQUIRE(law.rows.size() == 4);
  for (const auto& r : law.rows) {
    CHECK(std::abs(r.D - scalar_gap(r.eps, 1.0, kK)) <= 1e-13);
    CHECK(std::abs(r.excess - (r.D - r.model)) <= 1e-15);
    CHECK(r.excess_over_eps > 0.0);
  }
  CHECK(law.c_bound >= law.rows.back().excess_over_eps);
}

TEST_CASE("periodic equilibrium reproduces the scalar gap") {
  const BaseGrid b = periodic_line(33, 1.0);
  const WarpedMetric m = metric_from_id("synthetic:1", b);
  const double eps = 0.05;
  const TodaConfig c = make_toda(b, m, eps, {Eigen::VectorXd::Constant(33, -0.1), Eigen::VectorXd::Constant(33, 0.1)},
                                 2.0, kH0);
  TodaSolveReport rep;
  const TodaConfig e = solve_equilibrium(c, 1e-12, &rep);
  const Eigen::VectorXd gap = e.sheets[1] - e.sheets[0];
  CHECK((gap.array() - scalar_gap(eps, 1.0, kK)).abs().maxCoeff() <= 1e-9);
  CHECK((e.sheets[0] - c.sheets[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.residual <= 1e-10);
}

TEST_CASE("closed base without positive potential has no equilibrium") {
  const BaseGrid b = periodic_line(17, 1.0);
  const TodaConfig c = make_toda(b, metric_from_id("flat", b), 0.05,
                                 {Eigen::VectorXd::Constant(17, -0.1), Eigen::VectorXd::Constant(17, 0.1)}, 2.0, kH0);
  try {
    solve_equilibrium(c, 1e-12);
    FAIL("expected no equilibrium");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoEquilibrium);
  }
}

TEST_CASE("two-sheet interaction forces are opposite") {
  const BaseGrid b = periodic_line(9, 1.0);
  Eigen::VectorXd lo(9), hi(9);
  for (int i = 0; i < 9; ++i) {
    lo[i] = -0.1 + 0.01 * std::sin(2.0 * M_PI * i / 9.0);
    hi[i] = 0.15;
  }
  const TodaConfig c = make_toda(b, metric_from_id("flat", b), 0.05, {lo, hi}, 2.0, kH0);
  const auto r = toda_rhs(c);
  REQUIRE(r.size() == 2);
  CHECK((r[0] + r[1]).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(r[0].maxCoeff() < 0.0);
  for (int i = 0; i < 9; ++i)
    CHECK(std::abs(r[1][i] - kK * std::exp(-kSqrt2 * (hi[i] - lo[i]) / 0.05)) <= 1e-14 * kK);
}
