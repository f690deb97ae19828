#include <cmath>

#include "aclab/barrier.hpp"
#include "aclab/error.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

BarrierContextPtr context(double eps) {
  const FieldGrid g = barrier_grid(eps, 0.1);
  return make_barrier_context(g, metric_from_id("flat", g.base), share_well(standard_well()), eps, 0.1, 0.125);
}

const BarrierContextPtr& ctx10() {
  static const BarrierContextPtr c = context(0.1);
  return c;
}

const BarrierContextPtr& ctx05() {
  static const BarrierContextPtr c = context(0.05);
  return c;
}

BarrierState zero_state(const BarrierContext& c) {
  return {Eigen::VectorXd::Zero(c.size()), Eigen::VectorXd::Zero(c.size()), Eigen::VectorXd::Zero(c.ny())};
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::NumericFailure;
}

}  // namespace

TEST_CASE("cutoffs: plateaus, parity and the quarter point") {
  const double r = std::pow(0.1, 0.1);
  for (int j = 1; j <= 5; ++j) {
    const Cutoff c = cutoff(0.1, 0.1, j);
    CHECK(c.eval(0, 0.0) == 1.0);
    CHECK(c.eval(0, c.inner) == 1.0);
    CHECK(c.eval(0, c.outer) == 0.0);
    CHECK(c.eval(0, 1.0) == 0.0);
    for (double t : {0.3, c.inner + 0.3 * c.width(), c.inner + 0.8 * c.width()}) {
      CHECK(c.eval(0, t) == c.eval(0, -t));
      CHECK(c.eval(1, t) == -c.eval(1, -t));
    }
    // chi_{j-1} = 1 on the support of chi_j
    if (j > 1) CHECK(c.outer < cutoff(0.1, 0.1, j - 1).inner);
  }
  // frozen: quintic smoothstep at a quarter of the chi_2 transition
  CHECK(std::abs(cutoff(0.1, 0.1, 2).eval(0, r * 0.9725) - 0.896484375) <= 1e-12);
  CHECK(cutoff(0.1, 0.1, 2).weighted_norm(1, 0.1) <= 200.0);
  CHECK(kind_of([] { cutoff(0.1, 0.1, 6); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("offset map round trip and injectivity") {
  const Cutoff c2 = cutoff(0.1, 0.1, 2);
  const double zeta = 0.3 * c2.width();
  for (double s : {-0.99, -0.97, -0.5, 0.0, 0.4, 0.975, 0.99}) {
    const double t = offset_inverse(c2, zeta, s);
    CHECK(std::abs(offset_forward(c2, zeta, t) - s) <= 1e-10);
  }
  CHECK(kind_of([&] { offset_inverse(c2, c2.width(), 0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("functionals at the zero state") {
  const BarrierContext& c = *ctx10();
  const BarrierState z = zero_state(c);
  const Functionals fc = functionals(c, z, SignConvention::consistent);
  const Functionals fp = functionals(c, z, SignConvention::printed);
  CHECK(fc.Q.cwiseAbs().maxCoeff() == 0.0);
  const int i = c.ny() / 2;
  for (int j = 1; j < c.nz() - 1; j += 37) {
    const int p = c.grid.index(i, j);
    const double E = fc.E[p];
    CHECK(std::abs(fc.M[p] + c.chi_s[3][j] * E) <= 1e-15 * (1.0 + std::abs(E)));
    CHECK(std::abs(fc.N[p] + (1.0 - c.chi_s[4][j]) * E) <= 1e-15 * (1.0 + std::abs(E)));
    CHECK(std::abs(fp.N[p] - (1.0 - c.chi_s[4][j]) * E) <= 1e-15 * (1.0 + std::abs(E)));
  }
}

TEST_CASE("discrete E at the zero state against frozen values") {
  // tools/oracles/barrier_oracles.py E0_discrete
  const BarrierContext& a = *ctx10();
  REQUIRE(a.nz() == 1009);
  const Functionals fa = functionals(a, zero_state(a));
  const int ia = a.ny() / 2;
  CHECK(std::abs(fa.E[a.grid.index(ia, 107)] - (-0.019544986310649420056)) <= 2e-9);
  CHECK(std::abs(fa.E[a.grid.index(ia, 524)] - 0.000029474292884220699457) <= 2e-9);

  const BarrierContext& b = *ctx05();
  REQUIRE(b.nz() == 1081);
  const Functionals fb = functionals(b, zero_state(b));
  const int ib = b.ny() / 2;
  CHECK(std::abs(fb.E[b.grid.index(ib, 524)] - (-0.00011673246051308380084)) <= 2e-9);
  CHECK(std::abs(fb.E[b.grid.index(ib, 543)] - 0.000035288509607976744122) <= 2e-9);
  CHECK(std::abs(fb.E[b.grid.index(ib, 560)] - 0.00011042085024077747898) <= 2e-9);
  CHECK(fb.E.cwiseAbs().maxCoeff() <= 0.05 * 0.05 * 0.05);
}

TEST_CASE("fixed point for a nonzero family member") {
  const BarrierContextPtr& c = ctx10();
  const BoundaryData d = family_data(*c, 0.05);
  CHECK_NOTHROW(validate_data(*c, d));
  const BarrierResult r = fixed_point_solve(c, d);
  CHECK(r.converged);
  CHECK(r.contraction < 1.0);
  CHECK(r.residual <= 1e-8);
  CHECK(r.boundary_mismatch == 0.0);
  CHECK(r.projection <= 1e-10);

  PhaseField below = r.u;
  below.u.array() -= 0.1;
  const ContactReport ok = comparison_check(below, r.u);
  CHECK(ok.ordered);
  CHECK(ok.contact.empty());
  CHECK(kind_of([&] { comparison_check(r.u, below); }) == ErrorKind::Precondition);
}

TEST_CASE("boundary data validation") {
  const BarrierContext& c = *ctx10();
  BoundaryData d = family_data(c, 0.05);
  d.v_sharp_hat.col(0) += c.psi;
  CHECK(kind_of([&] { validate_data(c, d); }) == ErrorKind::InvalidArgument);
  CHECK(std::abs(project_column(c, c.psi) - 1.0) <= 1e-14);
  BoundaryData e = family_data(c, 0.05);
  e.zeta_hat[0] = c.chi[2].width();
  CHECK(kind_of([&] { validate_data(c, e); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Holder norm is homogeneous") {
  const BarrierContext& c = *ctx10();
  Eigen::VectorXd v(c.size());
  for (int p = 0; p < v.size(); ++p) v[p] = std::sin(0.01 * p);
  const double n1 = holder_norm(c.grid, v, c.eps, c.alpha);
  CHECK(std::abs(holder_norm(c.grid, 3.0 * v, c.eps, c.alpha) - 3.0 * n1) <= 1e-12 * n1);
  CHECK(holder_norm_1d(Eigen::VectorXd::Constant(50, 2.0), 0.01, 0.1, 0.5, 0.0) == 2.0);
}

TEST_CASE("barrier needs a minimal central leaf") {
  const FieldGrid g = barrier_grid(0.1, 0.1);
  CHECK(kind_of([&] {
          make_barrier_context(g, metric_from_id("circle:1", g.base), share_well(standard_well()), 0.1, 0.1);
        }) == ErrorKind::Precondition);
}
