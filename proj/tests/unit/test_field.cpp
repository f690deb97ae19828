#include <cmath>
#include <filesystem>

#include "aclab/error.hpp"
#include "aclab/field.hpp"
#include "aclab/layers.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

const double kH0 = 2.0 * std::sqrt(2.0) / 3.0;

WellPtr std_well() { return share_well(standard_well()); }

SetupPtr flat_setup(double eps, int ny = 9) {
  const BaseGrid b = periodic_line(ny, 1.0);
  const FieldGrid g = make_field_grid(b, -1.0, 1.0, static_cast<int>(std::round(2.0 / (eps / 8.0))) + 1);
  return make_setup(g, metric_from_id("flat", b), std_well());
}

PhaseField tanh_field(SetupPtr s, double eps, double shift = 0.0) {
  const FieldGrid& g = s->grid;
  Eigen::VectorXd u(g.size());
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) u[g.index(i, j)] = std::tanh((g.z(j) - shift) / (std::sqrt(2.0) * eps));
  return make_field(s, eps, u);
}

}  // namespace

TEST_CASE("flat single layer: energy and mass equal h0 times length") {
  const double eps = 0.1;
  NewtonReport nr;
  const PhaseField f = newton_solve(tanh_field(flat_setup(eps), eps), 1e-10, 50, &nr);
  REQUIRE(nr.converged);
  CHECK(residual_sup(f) <= 1e-10);
  CHECK(std::abs(energy(f) / kH0 - 1.0) <= 0.01);
  CHECK(std::abs(varifold_mass(f, kH0) - 1.0) <= 0.01);
  CHECK(bound_excess(f) <= 1e-12);
}

TEST_CASE("constant wells are critical") {
  const PhaseField f = constant_field(flat_setup(0.1), 0.1, 1.0);
  CHECK(residual(f).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(energy(f)) <= 1e-12);
}

TEST_CASE("gradient flow does not increase energy") {
  const double eps = 0.1;
  PhaseField f = tanh_field(flat_setup(eps), eps, 0.2);
  for (int p = 0; p < f.u.size(); ++p) f.u[p] += 0.05 * std::sin(7.0 * p);
  const SetupPtr s = f.setup;
  for (int i = 0; i < s->grid.ny(); ++i) {
    f.u[s->grid.index(i, 0)] = -1.0;
    f.u[s->grid.index(i, s->grid.nz - 1)] = 1.0;
  }
  FlowTrace tr;
  const PhaseField g = gradient_flow(f, 1e-3, 25, &tr);
  REQUIRE(tr.energies.size() == 26);
  for (size_t k = 1; k < tr.energies.size(); ++k) CHECK(tr.energies[k] <= tr.energies[k - 1] + 1e-12);
  CHECK(energy(g) < energy(f));
}

TEST_CASE("checkpoint round trip") {
  const PhaseField f = tanh_field(flat_setup(0.1), 0.1);
  const auto path = std::filesystem::temp_directory_path() / "aclab_unit_checkpoint.bin";
  save_checkpoint(path.string(), f);
  const Checkpoint c = load_checkpoint(path.string());
  CHECK(c.ny == f.grid().ny());
  CHECK(c.nz == f.grid().nz);
  CHECK(c.eps == 0.1);
  CHECK(c.metric_id == "flat");
  CHECK((c.u - f.u).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path.string()), Error);
}

TEST_CASE("grid and resolution errors") {
  const BaseGrid b = periodic_line(9, 1.0);
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NumericFailure;
  };
  CHECK(kind([&] { make_field_grid(b, -1.0, 1.0, 4); }) == ErrorKind::InvalidArgument);
  const SetupPtr coarse = make_setup(make_field_grid(b, -1.0, 1.0, 41), metric_from_id("flat", b), std_well());
  CHECK(kind([&] { constant_field(coarse, 0.05, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([&] { make_setup(make_field_grid(b, -2.0, 1.0, 41), metric_from_id("circle:1", b), std_well()); }) ==
        ErrorKind::OutOfChart);
}

TEST_CASE("superpose and nodal layers round trip") {
  const double eps = 0.1;
  const SetupPtr s = flat_setup(eps);
  const int ny = s->grid.ny();
  const auto trunc = layer_truncation(std_well(), eps);
  const PhaseField f = superpose(s, *trunc, eps, {Eigen::VectorXd::Constant(ny, -0.4), Eigen::VectorXd::Constant(ny, 0.4)},
                                 {Eigen::VectorXd::Zero(ny), Eigen::VectorXd::Zero(ny)});
  const LayerStack st = nodal_layers(f);
  REQUIRE(st.Q == 2);
  CHECK((st.f[0].array() + 0.4).abs().maxCoeff() <= 1e-3);
  CHECK((st.f[1].array() - 0.4).abs().maxCoeff() <= 1e-3);
  CHECK(f.u.minCoeff() >= -1.0 - 1e-14);
  CHECK_THROWS_AS(superpose(s, *trunc, eps, {Eigen::VectorXd::Constant(ny, 0.0), Eigen::VectorXd::Constant(ny, 0.1)},
                            {Eigen::VectorXd::Zero(ny), Eigen::VectorXd::Zero(ny)}),
                  Error);
}

TEST_CASE("signed distance to a flat tilted sheet") {
  const BaseGrid b = interval(11, 1.0);
  const FieldGrid g = make_field_grid(b, -1.0, 1.0, 41);
  const SetupPtr s = make_setup(g, metric_from_id("flat", b), std_well());
  Eigen::VectorXd fs(11);
  for (int i = 0; i < 11; ++i) fs[i] = 0.1 + 0.2 * g.y(i);
  const Eigen::VectorXd d = signed_distance(*s, fs);
  const double n = std::sqrt(1.0 + 0.04);
  // away from the ends the nearest point lies on the line
  for (int i = 3; i < 8; ++i)
    for (int j = 15; j < 26; ++j) CHECK(std::abs(d[g.index(i, j)] - (g.z(j) - fs[i]) / n) <= 1e-12);
}
