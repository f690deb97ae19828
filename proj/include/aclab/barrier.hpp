#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <string>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/heteroclinic.hpp"

namespace aclab {

// Even cutoff: 1 on |t| <= inner, 0 on |t| >= outer, quintic smoothstep in between.
struct Cutoff {
  double inner = 0.0;
  double outer = 0.0;

  double eval(int k, double t) const;  // k = 0..3
  double width() const { return outer - inner; }
  // sum over m <= order of scale^m sup |chi^(m)|
  double weighted_norm(int order, double scale) const;
};

// chi_j with plateau eps^ds (1 - (2j-1)/100) and support eps^ds (1 - (2j-2)/100), j = 1..5.
Cutoff cutoff(double eps, double delta_star, int j);

// Grid spacing in s that resolves both eps and the cutoff transitions.
double barrier_spacing(double eps, double delta_star);
// Interval base of length L times s in [-1, 1]; hy = eps/4, hs from barrier_spacing (nz odd).
FieldGrid barrier_grid(double eps, double delta_star, double L = 0.5);

struct BarrierContext {
  FieldGrid grid;
  WarpedMetric metric;
  WellPtr well;
  std::shared_ptr<const Profile> profile;
  double eps = 0.1;
  double delta_star = 0.5;
  double alpha = 0.125;
  double w2_pm = 2.0;  // W''(+-1)

  Cutoff chi[6];               // chi[1..5]
  Eigen::VectorXd s;           // s nodes
  Eigen::VectorXd ws;          // trapezoid weights in s
  Eigen::VectorXd Ht;          // truncated heteroclinic at s nodes
  Eigen::VectorXd H;           // H(s / eps)
  Eigen::VectorXd psi;         // H'(s / eps)
  Eigen::VectorXd chi_s[6];    // chi_j at s nodes
  Eigen::VectorXd a0;          // a(y, 0) at base nodes
  Eigen::VectorXd V;           // Jacobi potential at base nodes
  Eigen::SparseMatrix<double, Eigen::RowMajor> lap0;  // Delta_g in Fermi coordinates, rows at interior nodes
  Eigen::SparseMatrix<double, Eigen::RowMajor> lapP;  // product Laplacian of g_0 + ds^2
  Eigen::MatrixXd J;                 // Jacobi operator on all base nodes (end rows unused)
  double jacobi_gap = 0.0;

  std::vector<int> interior;  // interior node indices
  std::vector<int> slot;      // node -> interior position or -1
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> calL;      // eps^2 Delta_0 - W''(+-1)
  // L = eps^2 Delta_P - W''(H_eps) on interior columns; the constraint Pi v = 0 is imposed through
  // the Schur complement of the multipliers.
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sharpL;
  Eigen::MatrixXd sharp_basis;            // L^{-1} applied to psi on each interior column
  Eigen::FullPivLU<Eigen::MatrixXd> schur;
  std::vector<int> sharp_slot;  // node -> unknown index or -1
  int sharp_unknowns = 0;
  Eigen::FullPivLU<Eigen::MatrixXd> Jlu;  // interior block of J

  int ny() const { return grid.ny(); }
  int nz() const { return grid.nz; }
  int size() const { return grid.size(); }
};

using BarrierContextPtr = std::shared_ptr<const BarrierContext>;

// Factors the three linear operators once. The metric must keep z = 0 minimal and J_Sigma invertible.
BarrierContextPtr make_barrier_context(const FieldGrid& grid, const WarpedMetric& metric, WellPtr well,
                                       double eps, double delta_star = 0.5, double alpha = 0.125);

// D_zeta(y, t) = (y, t - chi_2(t) zeta(y)).
double offset_forward(const Cutoff& chi2, double zeta, double t);
// Monotone root of t - chi_2(t) zeta = s; throws invalid-argument when the map is not injective.
double offset_inverse(const Cutoff& chi2, double zeta, double s);

// Inverse map and its derivatives at the grid nodes (y_i, s_j).
struct OffsetMap {
  Eigen::VectorXd tau, tau_s, tau_y;
};
OffsetMap offset_map(const BarrierContext& c, const Eigen::VectorXd& zeta);

// Discrete Laplacian of g pulled back by D_zeta^{-1}, acting on grid functions of (y, s).
Eigen::SparseMatrix<double, Eigen::RowMajor> pulled_back_laplacian(const BarrierContext& c, const Eigen::VectorXd& zeta);

struct BarrierState {
  Eigen::VectorXd v_flat;   // on Omega
  Eigen::VectorXd v_sharp;  // on Sigma x [-1, 1]
  Eigen::VectorXd zeta;     // on Sigma
};

enum class SignConvention { consistent, printed };

struct Functionals {
  Eigen::VectorXd E, Q, M, N;
};

// E(zeta), Q(chi_4 v_sharp + v_flat), M, N at interior nodes (zero on the boundary).
Functionals functionals(const BarrierContext& c, const BarrierState& st,
                        SignConvention sign = SignConvention::consistent);

struct BoundaryData {
  Eigen::VectorXd v_flat_hat;   // read at boundary nodes of Omega
  Eigen::MatrixXd v_sharp_hat;  // nz x 2: columns at the two base ends
  Eigen::Vector2d zeta_hat = Eigen::Vector2d::Zero();
  double mu = 0.0;
};

// Discrete Pi_eps of one column, normalized so that Pi(psi) = 1.
double project_column(const BarrierContext& c, const Eigen::VectorXd& col);
// Max over interior base nodes of |Pi v_sharp|.
double projection_sup(const BarrierContext& c, const Eigen::VectorXd& v_sharp);

// The five-member test family, member mu: smooth data of size mu eps^2 in each slot.
BoundaryData family_data(const BarrierContext& c, double mu);
// Data for the sliding barrier: b = 1 - eps^3 above 2 B eps|log eps| and -1 below -2 B eps|log eps|.
BoundaryData sliding_data(const BarrierContext& c, double B);
// Throws invalid-argument when v_flat_hat is nonzero on {chi_4 = 1} or Pi(v_sharp_hat) is nonzero.
void validate_data(const BarrierContext& c, const BoundaryData& d);

// C^{k,alpha}_eps norm of a grid function: sum_j eps^j |grad^j v| + eps^{k+alpha} [grad^k v]_alpha
// with the Holder seminorm over axis-aligned node pairs within 3 eps.
double holder_norm(const FieldGrid& g, const Eigen::VectorXd& v, double eps, double alpha, int k = 2);
// One-dimensional version on a uniform line with spacing h; reach <= 0 means all pairs.
double holder_norm_1d(const Eigen::VectorXd& v, double h, double eps, double alpha, double reach, int k = 2);
// eps^-2 |chi_5 v| + |v|
double modified_norm(const BarrierContext& c, const Eigen::VectorXd& v);
double state_norm(const BarrierContext& c, const BarrierState& st);
double data_norm(const BarrierContext& c, const BoundaryData& d);
BarrierState difference(const BarrierState& a, const BarrierState& b);
BoundaryData difference(const BoundaryData& a, const BoundaryData& b);

struct IterationRecord {
  int k = 0;
  double update = 0.0;  // |state_k - state_{k-1}|_U
  double factor = 0.0;  // update_k / update_{k-1}
  double residual = 0.0;
  double flat_norm = 0.0, sharp_norm = 0.0, zeta_norm = 0.0;
};

struct BarrierResult {
  BarrierState state;
  Eigen::VectorXd F;  // Htilde + chi_4 v_sharp + v_flat on the (y, s) grid
  PhaseField u;       // F composed with D_zeta, on the original grid
  std::vector<IterationRecord> trace;
  int iterations = 0;
  bool converged = false;
  double contraction = 0.0;      // geometric mean of the update ratios after the first sweep
  double contraction_max = 0.0;  // worst single ratio, including block lag transients
  double residual = 0.0;          // sup |eps^2 Delta_zeta F - W'(F)| at interior nodes
  double original_residual = 0.0; // residual of u on the original grid (interpolation limited)
  double boundary_mismatch = 0.0;
  double projection = 0.0;
  double strip_constant = 0.0;    // max |s| / eps on {|F| <= 0.9}
  double flat_norm = 0.0, sharp_norm = 0.0, zeta_norm = 0.0;
};

// Three-block iteration until the update falls below tol times the first update in the U norm.
BarrierResult fixed_point_solve(BarrierContextPtr c, const BoundaryData& d, double tol = 1e-9,
                                int max_iter = 80);

struct ContactReport {
  bool ordered = true;
  double min_gap = 0.0;  // min of u - b
  int argmin = -1;
  bool argmin_on_boundary = false;
  std::vector<int> contact;  // nodes with u - b <= 0
};

// Ordering of b below u without preconditions.
ContactReport ordering(const PhaseField& b, const PhaseField& u);
// Requires b < u on the boundary (precondition error otherwise).
ContactReport comparison_check(const PhaseField& b, const PhaseField& u);

// Smallest B with dist(x, {u = 0}) > 3 B eps|log eps| implying |u| > 1 - eps^3 on the grid.
double decay_constant(const PhaseField& u);
// u(y, z + shift) sampled on g (same base nodes), cubic in z.
PhaseField pull_back(const PhaseField& u, SetupPtr target, double shift);

struct SlidingReport {
  double B_measured = 0.0;
  double B = 0.0;
  double leaf = 0.0;  // height c of the t = 0 leaf
  double delta = 0.0;
  double t_star = 0.0;
  double bound = 0.0;  // 7 B eps|log eps|
  bool start_ordered = false;
  bool within = false;
  ContactReport contact;
  int bisections = 0;
};

// Slides b(y, z - c - t) down from t = delta and bisects for the first contact with u.
SlidingReport sliding(const BarrierResult& barrier, const PhaseField& u, double leaf, double delta,
                      double B, double B_measured, int scan = 64);

}  // namespace aclab
