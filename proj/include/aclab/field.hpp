#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "aclab/geometry.hpp"
#include "aclab/potential.hpp"

namespace aclab {

// Tensor grid over a one-dimensional base times [z_lo, z_hi]; node (i, j) has index i * nz + j.
struct FieldGrid {
  BaseGrid base;
  int nz = 0;
  double z_lo = -1.0, z_hi = 1.0;
  bool z_periodic = false;

  int ny() const { return base.n[0]; }
  int size() const { return ny() * nz; }
  double hy() const { return base.h(0); }
  double hz() const { return z_periodic ? (z_hi - z_lo) / nz : (z_hi - z_lo) / (nz - 1); }
  double y(int i) const { return base.node(i)[0]; }
  double z(int j) const { return z_lo + j * hz(); }
  int index(int i, int j) const { return i * nz + j; }
  bool fixed(int i, int j) const {
    return (!base.periodic && (i == 0 || i == ny() - 1)) || (!z_periodic && (j == 0 || j == nz - 1));
  }
};

FieldGrid make_field_grid(const BaseGrid& base, double z_lo, double z_hi, int nz, bool z_periodic = false);

// Conservative discretization: u^T S u approximates the Dirichlet integral, w are node volumes,
// and Delta_h u = -(S u) / w at free nodes.
struct FieldSetup {
  FieldGrid grid;
  WarpedMetric metric;
  WellPtr well;
  Eigen::SparseMatrix<double> S;
  Eigen::VectorXd w;
  std::vector<int> free;  // indices of unknowns
  std::vector<int> slot;  // index -> position in free, or -1 at Dirichlet nodes
  Eigen::SparseMatrix<double> S_ff;

  Eigen::VectorXd restrict_free(const Eigen::VectorXd& u) const;
};

using SetupPtr = std::shared_ptr<const FieldSetup>;

SetupPtr make_setup(const FieldGrid& grid, const WarpedMetric& metric, WellPtr well);

struct PhaseField {
  SetupPtr setup;
  double eps = 0.1;
  Eigen::VectorXd u;

  const FieldGrid& grid() const { return setup->grid; }
  double at(int i, int j) const { return u[setup->grid.index(i, j)]; }
};

// Enforces at least 8 nodes per eps in z.
PhaseField make_field(SetupPtr setup, double eps, const Eigen::VectorXd& u);
PhaseField constant_field(SetupPtr setup, double eps, double value);

double energy(const PhaseField& f);
// eps^2 Delta_g u - W'(u); zero at Dirichlet nodes.
Eigen::VectorXd residual(const PhaseField& f);
double residual_sup(const PhaseField& f);
// h0^{-1} int eps |grad u|^2
double varifold_mass(const PhaseField& f, double h0);
// max |u| - 1 over the grid (positive means the maximum-principle slack is used)
double bound_excess(const PhaseField& f);

struct FlowTrace {
  std::vector<double> energies;
  double max_increase = 0.0;
};

// Stabilized semi-implicit steps of u_t = eps^2 Delta u - W'(u); energy must not increase.
PhaseField gradient_flow(const PhaseField& f, double dt, int steps, FlowTrace* trace = nullptr,
                         double stabilizer = 2.0);

struct NewtonReport {
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
};

// Newton on eps^2 Delta u = W'(u) at the free nodes with backtracking on the residual.
PhaseField newton_solve(const PhaseField& f0, double tol, int max_iter, NewtonReport* report = nullptr);

// Second-variation matrix on the free nodes: eps S + diag(w W''(u) / eps).
Eigen::SparseMatrix<double> hessian_free(const PhaseField& f);

// Column of u at base node i.
Eigen::VectorXd column(const PhaseField& f, int i);

// Flat binary: magic, ny, nz, eps, metric id, little-endian row-major doubles.
void save_checkpoint(const std::string& path, const PhaseField& f);
struct Checkpoint {
  int ny = 0, nz = 0;
  double eps = 0.0;
  std::string metric_id;
  Eigen::VectorXd u;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace aclab
