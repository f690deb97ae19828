#include <cmath>
#include <memory>

#include "aclab/error.hpp"
#include "aclab/heteroclinic.hpp"
#include "aclab/potential.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

const Profile& standard_profile() {
  static const Profile p = solve_profile(share_well(standard_well()), 16.0, 8192);
  return p;
}

}  // namespace

TEST_CASE("profile matches tanh(t / sqrt2)") {
  const Profile& p = standard_profile();
  double err = 0.0;
  for (int i = 0; i <= p.n; ++i)
    if (std::abs(p.t[i]) <= 10.0) err = std::max(err, std::abs(p.H[i] - std::tanh(p.t[i] / std::sqrt(2.0))));
  CHECK(err <= 1e-8);
  // mpmath oracle value of H(1)
  CHECK(std::abs(p.eval(0, 1.0) - 0.60885936501391381039) <= 1e-10);
  CHECK(p.eval(0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("profile is odd and monotone") {
  const Profile& p = standard_profile();
  for (int i = 0; i <= p.n; ++i) CHECK(std::abs(p.H[i] + p.H[p.n - i]) <= 1e-13);
  for (int i = 1; i <= p.n; ++i)
    if (std::abs(p.H[i]) < 1.0 - 1e-12) CHECK(p.H[i] > p.H[i - 1]);
}

TEST_CASE("energy and tail constants") {
  const Profile& p = standard_profile();
  CHECK(std::abs(p.h0 - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-8);
  CHECK(std::abs(p.h0_profile - p.h0) <= 1e-8);
  CHECK(std::abs(p.A0 - 2.0) <= 1e-4);
  CHECK(std::abs(p.A0_minus - 2.0) <= 1e-4);
  const TailFit f = fit_tail(p, 4.0, 8.0, +1);
  CHECK(std::abs(f.A0 - 2.0) <= 1e-4);
}

TEST_CASE("corrector J") {
  const Profile& p = standard_profile();
  const JTable j = solve_j(p);
  CHECK(j.ode_residual <= 1e-8);
  CHECK(j.parity_defect <= 1e-10);
  CHECK(std::abs(j.w3_identity + p.h0 / 2.0) <= 1e-6);
  const int i2 = p.center() + static_cast<int>(std::lround(2.0 / p.dt));
  // mpmath oracle value of J(2)
  CHECK(std::abs(j.J[i2] - (-0.20915367988778471075)) <= 1e-9);
}

TEST_CASE("interaction integral against frozen quadrature") {
  const Profile& p = standard_profile();
  const double oracle[3] = {-2.7597395571256045746e-4, -1.6321546975957037502e-5, -9.6474291500848035813e-7};
  const double T[3] = {8.0, 10.0, 12.0};
  for (int k = 0; k < 3; ++k) {
    const Interaction I = interaction_integral(p, T[k]);
    CHECK(std::abs(I.value / oracle[k] - 1.0) <= 1e-8);
    const double ref = -16.0 * std::sqrt(2.0) * std::exp(-std::sqrt(2.0) * T[k]);
    CHECK(std::abs(I.value / ref - 1.0) <= (T[k] == 8.0 ? 0.05 : 0.01));
  }
}

TEST_CASE("truncated profile defect is O(eps^3)") {
  auto p = std::make_shared<Profile>(solve_profile(share_well(standard_well()), 32.0, 16384));
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const TruncatedProfile tp(p, 3.0 * std::abs(std::log(eps)));
    CHECK(tp.defect_sup() <= 0.2 * eps * eps * eps);
    CHECK(std::abs(tp.eval(0, 0.7) + tp.eval(0, -0.7)) <= 1e-14);
    CHECK(tp.eval(0, 3.0 * tp.Lambda()) == doctest::Approx(1.0));
  }
}

TEST_CASE("profile grid arguments are validated") {
  CHECK_THROWS_AS(solve_profile(share_well(standard_well()), 16.0, 8191), Error);
  CHECK_THROWS_AS(solve_profile(share_well(standard_well()), 5.0, 8192), Error);
}
