#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace aclab {

// Uniform tensor grid on the base. Periodic: nodes j*L/n, j < n, n odd. Interval: nodes j*L/(n-1), ends included.
struct BaseGrid {
  int dim = 1;
  int n[2] = {64, 1};
  double L[2] = {1.0, 1.0};
  bool periodic = true;

  int size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  double h(int axis) const { return periodic ? L[axis] / n[axis] : L[axis] / (n[axis] - 1); }
  Eigen::Vector2d node(int j) const;
  double weight(int j) const;  // trapezoid weight
  bool on_boundary(int j) const;
};

BaseGrid periodic_line(int n, double L);
BaseGrid interval(int n, double L);
BaseGrid periodic_torus(int n0, int n1, double L0, double L1);

// One warping factor and its derivatives: a_i(y, z), d/dz, d2/dz2, and d/dy_i.
struct WarpSample {
  double a = 1.0, az = 0.0, azz = 0.0, ay = 0.0;
};

// g = sum_i a_i(y, z)^2 dy_i^2 + dz^2 over the base.
struct WarpedMetric {
  std::string id;
  int dim = 1;
  double z_lo = -1e3, z_hi = 1e3;
  std::function<WarpSample(int i, const Eigen::Vector2d& y, double z)> warp;

  bool is_flat = false;
  bool is_product = false;  // a independent of z

  WarpSample at(int i, const Eigen::Vector2d& y, double z) const { return warp(i, y, z); }
  // mean curvature of {z = const} for the upward normal: sum a_iz / a_i
  double H(const Eigen::Vector2d& y, double z) const;
  double sff_norm2(const Eigen::Vector2d& y, double z) const;
  double ric_zz(const Eigen::Vector2d& y, double z) const;
  // |sff|^2 + Ric(dz, dz)
  double potential(const Eigen::Vector2d& y, double z = 0.0) const {
    return sff_norm2(y, z) + ric_zz(y, z);
  }
  double volume_factor(const Eigen::Vector2d& y, double z) const;
};

WarpedMetric flat_metric(int dim = 1);
// (R + z)^2 dtheta^2 + dz^2 with theta scaled so that y in [0, L) covers the circle: a = (R + z) 2pi/L.
WarpedMetric circle_metric(double R, double L);
// a_i = exp(-V(y) z^2 / (2 dim)); then |sff|^2 + Ric(dz, dz) = V(y) for every z.
WarpedMetric synthetic_metric(std::function<double(const Eigen::Vector2d&)> V,
                              std::function<double(const Eigen::Vector2d&)> Vy, int dim,
                              const std::string& id);

// "flat", "circle:R", "synthetic:V", "synthetic-cos:c0,c1" (V = c0 + c1 cos(2 pi y / L0)).
WarpedMetric metric_from_id(const std::string& id, const BaseGrid& base);

struct LeafGeometry {
  double g[2] = {1.0, 1.0};
  double A[2] = {0.0, 0.0};  // covariant sff components A_ii
  double H = 0.0;
  double sff2 = 0.0;
  double ric = 0.0;
};

// Closed form from the warping factors.
LeafGeometry leaf_geometry(const WarpedMetric& m, const Eigen::Vector2d& y, double z);

// Integrates dg = 2A, dA = A^2/g - R, dH = -|A|^2 - Ric from z = 0 with adaptive RK4.
LeafGeometry evolve_geometry(const WarpedMetric& m, const Eigen::Vector2d& y, double z, double tol = 1e-12);

// Spectral (periodic) or second-order (interval) derivative along an axis.
Eigen::VectorXd base_diff(const BaseGrid& b, const Eigen::VectorXd& f, int axis);
Eigen::MatrixXd fourier_diff_matrix(int n, double L);

void check_graph(const WarpedMetric& m, const Eigen::VectorXd& f);

double graph_area(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f);
// Exact gradient of the discrete area divided by the node measure of g_f.
Eigen::VectorXd graph_mean_curvature(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f);
// Node measure w * prod a_i(y, f(y)) used to pair H with variations.
Eigen::VectorXd graph_measure(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f);

// Pointwise form -sff_f(df, df)/W + W H_f - H_0 + V_0 f.
Eigen::VectorXd quad_error(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f);
// H[f] - H_0 + (sqrt g0/sqrt gf) div_{g0}(...) + V_0 f, with discrete derivatives throughout.
Eigen::VectorXd quad_error_divergence(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f);

// J f = -Delta_{g0} f - V f on the z = 0 leaf (homogeneous Dirichlet on intervals).
struct JacobiOperator {
  Eigen::MatrixXd J;
  Eigen::VectorXd mass;    // node measure, J is self-adjoint for it
  std::vector<int> nodes;  // grid indices of unknowns
  Eigen::VectorXd V;       // potential at the unknowns

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return J * f; }
  Eigen::MatrixXd symmetric() const;
};

JacobiOperator jacobi_operator(const WarpedMetric& m, const BaseGrid& b);
// eta with int (J f)^2 >= eta int f^2 over the discrete space.
double jacobi_gap(const JacobiOperator& op);

struct MinimalGraph {
  Eigen::VectorXd f;
  double residual = 0.0;
  int iterations = 0;
};

// Newton on H[f] = 0 over an interval, f = boundary + t at the ends.
MinimalGraph minimal_graph(const WarpedMetric& m, const BaseGrid& b, double left, double right, double t,
                           double tol = 1e-10, int max_iter = 50);
// Solves for each t (ascending) and throws foliation-violation if two graphs touch or cross.
std::vector<MinimalGraph> minimal_graph_family(const WarpedMetric& m, const BaseGrid& b, double left,
                                               double right, const std::vector<double>& ts, double tol = 1e-10);

// Columns y, z, H_z, sff2 on the grid times a z sample list.
void write_geometry_csv(const std::string& path, const WarpedMetric& m, const BaseGrid& b,
                        const std::vector<double>& zs);

}  // namespace aclab
