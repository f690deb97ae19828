#include <cmath>
#include <random>

#include "aclab/error.hpp"
#include "aclab/geometry.hpp"
#include "doctest.h"

using namespace aclab;

TEST_CASE("circle leaves have mean curvature 1/(R+z)") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  const WarpedMetric m = metric_from_id("circle:1", b);
  for (double z : {-0.3, 0.0, 0.5}) {
    const LeafGeometry g = leaf_geometry(m, {0.4, 0.0}, z);
    CHECK(std::abs(g.H - 1.0 / (1.0 + z)) <= 1e-12);
    CHECK(std::abs(g.sff2 - 1.0 / ((1.0 + z) * (1.0 + z))) <= 1e-12);
    CHECK(std::abs(g.ric) <= 1e-12);
  }
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(b.n[0], 0.5);
  CHECK((graph_mean_curvature(m, b, f).array() - 2.0 / 3.0).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("synthetic metric potential is V at every height") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  const WarpedMetric m = metric_from_id("synthetic-cos:0.5,2", b);
  for (double y : {0.0, 1.0, 2.5})
    for (double z : {-0.2, 0.0, 0.3}) CHECK(std::abs(m.potential({y, 0.0}, z) - (0.5 + 2.0 * std::cos(y))) <= 1e-10);
}

TEST_CASE("mean curvature is the area gradient") {
  const BaseGrid b = periodic_line(65, 2.0 * M_PI);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  for (const char* id : {"circle:1", "synthetic-cos:0.5,2", "flat"}) {
    const WarpedMetric m = metric_from_id(id, b);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd f(b.n[0]), phi(b.n[0]);
      const double c0 = 0.05 * N(rng), c1 = 0.05 * N(rng), d0 = N(rng), d1 = N(rng);
      for (int j = 0; j < b.n[0]; ++j) {
        const double y = b.node(j)[0];
        f[j] = c0 * std::cos(y) + c1 * std::sin(2.0 * y);
        phi[j] = d0 + d1 * std::cos(3.0 * y);
      }
      const double s = 1e-4;
      const double fd = (graph_area(m, b, f + s * phi) - graph_area(m, b, f - s * phi)) / (2.0 * s);
      const double an = graph_mean_curvature(m, b, f).cwiseProduct(graph_measure(m, b, f)).dot(phi);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("Riccati evolution reproduces the closed form") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  for (const char* id : {"circle:1", "synthetic:2.5"}) {
    const WarpedMetric m = metric_from_id(id, b);
    for (double z : {-0.4, 0.2}) {
      const LeafGeometry e = evolve_geometry(m, b.node(3), z);
      const LeafGeometry c = leaf_geometry(m, b.node(3), z);
      CHECK(std::abs(e.H - c.H) <= 1e-8);
      CHECK(std::abs(e.g[0] - c.g[0]) <= 1e-8);
      CHECK(std::abs(e.A[0] - c.A[0]) <= 1e-8);
    }
  }
}

TEST_CASE("Riccati evolution past the focal point is degenerate") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  const WarpedMetric m = metric_from_id("circle:1", b);
  try {
    evolve_geometry(m, b.node(0), -1.2);
    FAIL("expected a degenerate geometry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GeometryDegenerate);
  }
}

TEST_CASE("quadratic error halves by four on the circle") {
  const BaseGrid b = periodic_line(65, 2.0 * M_PI);
  const WarpedMetric m = metric_from_id("circle:1", b);
  Eigen::VectorXd g(b.n[0]);
  for (int j = 0; j < b.n[0]; ++j) g[j] = 0.02 * std::sin(b.node(j)[0]) + 0.01 * std::cos(2.0 * b.node(j)[0]);
  const double r = quad_error(m, b, g).cwiseAbs().maxCoeff() / quad_error(m, b, 0.5 * g).cwiseAbs().maxCoeff();
  CHECK(r >= 3.5);
  CHECK(r <= 4.5);
}

TEST_CASE("flat Jacobi operator acts on Fourier modes") {
  const BaseGrid b = periodic_line(33, 2.0 * M_PI);
  const JacobiOperator op = jacobi_operator(metric_from_id("flat", b), b);
  Eigen::VectorXd s(b.n[0]);
  for (int j = 0; j < b.n[0]; ++j) s[j] = std::sin(b.node(j)[0]);
  CHECK((op.apply(s) - s).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::MatrixXd S = op.symmetric();
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("affine graphs are minimal in the flat metric") {
  const BaseGrid b = interval(41, 1.0);
  const WarpedMetric m = metric_from_id("flat", b);
  const MinimalGraph g = minimal_graph(m, b, -0.1, 0.3, 0.0);
  CHECK(g.residual <= 1e-10);
  for (int j = 0; j < b.n[0]; ++j) CHECK(std::abs(g.f[j] - (-0.1 + 0.4 * b.node(j)[0])) <= 1e-10);
}

TEST_CASE("minimal graph family is a foliation") {
  const BaseGrid b = interval(41, 1.0);
  const WarpedMetric m = metric_from_id("synthetic:1", b);
  const auto fam = minimal_graph_family(m, b, 0.0, 0.0, {-0.1, 0.0, 0.1});
  REQUIRE(fam.size() == 3);
  for (size_t k = 1; k < fam.size(); ++k) CHECK((fam[k].f - fam[k - 1].f).minCoeff() > 0.0);
}

TEST_CASE("metric ids are validated") {
  const BaseGrid b = periodic_line(33, 1.0);
  for (const char* id : {"hyperbolic", "synthetic", "circle:"}) {
    try {
      metric_from_id(id, b);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigError);
    }
  }
}
