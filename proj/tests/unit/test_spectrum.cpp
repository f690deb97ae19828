#include <cmath>

#include "aclab/eigs.hpp"
#include "aclab/error.hpp"
#include "aclab/field.hpp"
#include "aclab/heteroclinic.hpp"
#include "aclab/layers.hpp"
#include "aclab/spectrum.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

PhaseField single_layer(double eps) {
  const BaseGrid b = periodic_line(9, 1.0);
  const FieldGrid g = make_field_grid(b, -1.0, 1.0, static_cast<int>(std::round(2.0 / (eps / 8.0))) + 1);
  const SetupPtr s = make_setup(g, metric_from_id("flat", b), share_well(standard_well()));
  Eigen::VectorXd u(g.size());
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) u[g.index(i, j)] = std::tanh(g.z(j) / (std::sqrt(2.0) * eps));
  return newton_solve(make_field(s, eps, u), 1e-10, 50);
}

}  // namespace

TEST_CASE("Lanczos matches the discrete Dirichlet Laplacian") {
  const int n = 800;
  Eigen::SparseMatrix<double> A(n, n);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  A.setFromTriplets(t.begin(), t.end());
  const EigResult e = lowest_eigs(A, Eigen::VectorXd::Ones(n), 4, 0.0, 1e-10, 100);
  REQUIRE(e.values.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
    CHECK(std::abs(e.values[k] - exact) <= 1e-9 * std::max(1.0, exact) + 1e-12);
    CHECK(e.residuals[k] <= 1e-8);
  }
  const EigResult d = lowest_eigs_dense(Eigen::MatrixXd(A), Eigen::VectorXd::Ones(n), 4);
  CHECK((d.values - e.values).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("second variation and quadratic form agree") {
  const PhaseField f = single_layer(0.1);
  const FieldSetup& s = *f.setup;
  Eigen::VectorXd z(s.grid.size());
  for (int p = 0; p < z.size(); ++p) z[p] = std::cos(0.37 * p) + 0.2;
  const double q1 = quadratic_form(f, z);
  const double q2 = s.w.cwiseProduct(second_variation_apply(f, z)).dot(z);
  CHECK(std::abs(q1 - q2) <= 1e-10 * std::abs(q1));
}

TEST_CASE("constant well field has potential 2/eps") {
  const PhaseField f = single_layer(0.1);
  const PhaseField c = constant_field(f.setup, 0.1, 1.0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(c.u.size());
  CHECK((second_variation_apply(c, one).array() - 2.0 / 0.1).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("flat single layer is stable with a translation kernel") {
  const double eps = 0.1;
  const PhaseField f = single_layer(eps);
  const SpectrumReport r = morse_index(f, 4, default_zero_tol(eps));
  CHECK(r.index == 0);
  CHECK(r.nullity == 1);
  const TranslationMode t = translation_mode(f, r);
  CHECK(t.overlap >= 0.99);
  CHECK(t.eigen_residual <= 1e-6);
}

TEST_CASE("surface index of constant-potential leaves") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  const SpectrumReport flat = surface_index(metric_from_id("flat", b), b, 4, 1e-8);
  CHECK(flat.index == 0);
  CHECK(flat.nullity == 1);
  // J = -d2 - 2.5 has eigenvalues k^2 - 2.5
  const SpectrumReport syn = surface_index(metric_from_id("synthetic:2.5", b), b, 4, 1e-8);
  CHECK(syn.index == 3);
  CHECK(syn.nullity == 0);
  CHECK(std::abs(syn.eigenvalues[0] + 2.5) <= 1e-10);
  CHECK(std::abs(syn.eigenvalues[1] + 1.5) <= 1e-10);
  CHECK(std::abs(syn.eigenvalues[3] - 1.5) <= 1e-10);
  CHECK_THROWS_AS(surface_index(metric_from_id("flat", interval(9, 1.0)), interval(9, 1.0), 2, 1e-8), Error);
}

TEST_CASE("projection onto the profile derivative") {
  const double eps = 0.1;
  const PhaseField f = single_layer(eps);
  const FieldGrid& g = f.grid();
  const auto p = layer_profile(share_well(standard_well()));
  Eigen::VectorXd v(g.size()), fb(g.ny());
  for (int i = 0; i < g.ny(); ++i) {
    fb[i] = 1.0 + std::sin(2.0 * M_PI * g.y(i));
    for (int j = 0; j < g.nz; ++j) v[g.index(i, j)] = fb[i] * p->eval(1, g.z(j) / eps) + std::cos(3.0 * g.z(j));
  }
  const Projection pr = project(g, v, eps, *p);
  const Projection again = project(g, pr.perp, eps, *p);
  CHECK(again.pi.cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::VectorXd pure(g.size());
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) pure[g.index(i, j)] = fb[i] * p->eval(1, g.z(j) / eps);
  CHECK((project(g, pure, eps, *p).pi - fb).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(std::abs(pr.norm - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-3);
}

TEST_CASE("stability check at the calibration point") {
  StabilityTerms t;
  t.eps = 0.1;
  t.gradient = 0.3;
  t.mass = 2.0;
  t.s_kappa = 0.004;
  const double c = 0.7;
  t.lhs = c * (t.gradient + (t.eps * t.eps + t.s_kappa) * t.mass);
  CHECK(stability_check(t, c).satisfied);
  t.lhs *= 1.0 + 1e-9;
  CHECK_FALSE(stability_check(t, c).satisfied);
  CHECK(stability_check(t, 2.0 * c).margin > 0.0);
}
