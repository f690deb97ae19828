#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "aclab/potential.hpp"

namespace aclab {

// Tabulated heteroclinic on the uniform grid t_i = -t_max + i*dt, i = 0..n.
struct Profile {
  WellPtr well;
  double t_max = 0.0;
  int n = 0;
  double dt = 0.0;
  Eigen::VectorXd t, H, dH, d2H;
  double A0 = 0.0;
  double A0_minus = 0.0;
  double h0 = 0.0;          // quadrature of sqrt(2W)
  double h0_profile = 0.0;  // integral of H'^2 over the solved profile
  double ode_residual = 0.0;
  double first_integral_defect = 0.0;

  int center() const { return n / 2; }
  // k = 0, 1, 2: H, H', H'' at any t (Hermite cubic inside, exponential tail outside).
  double eval(int k, double t) const;
};

struct TailFit {
  double A0 = 0.0;
  double correction = 0.0;
  double residual = 0.0;
};

// Least squares on [t_lo, t_hi] of log(1 -+ H(+-t)) + sqrt2 t against {1, e^{-sqrt2 t}, e^{-2 sqrt2 t}}.
TailFit fit_tail(const Profile& p, double t_lo, double t_hi, int side);

// n grid intervals (even), t_max >= 10, n >= 2048.
Profile solve_profile(WellPtr well, double t_max = 16.0, int n = 8192);

// Sixth-order central difference of samples y with spacing h at interior index i.
double d6(const Eigen::VectorXd& y, int i, double h);

// sup over |t| in [t_lo, t_hi] of |H - sgn(t)(1 - A0 e^{-sqrt2|t|})| e^{2 sqrt2 |t|}.
double tail_expansion_constant(const Profile& p, double t_lo = 4.0, double t_hi = 10.0);

// chi(s) = 1 - S(|s| - 1) with the quintic smoothstep S on [0, 1]; k-th derivative, k = 0..4.
double cutoff_chi(int k, double s);

class TruncatedProfile {
 public:
  TruncatedProfile(std::shared_ptr<const Profile> base, double Lambda);

  // k-th derivative of the truncated profile, k = 0..4.
  double eval(int k, double t) const;
  // k-th derivative of the defect Hbar'' - W'(Hbar), k = 0..2.
  double defect(int k, double t) const;

  const Profile& base() const { return *base_; }
  double Lambda() const { return Lambda_; }
  // sup over the tabulation grid on [-2.5 Lambda, 2.5 Lambda] of |defect_0| + |defect_1| + |defect_2|.
  double defect_sup() const { return defect_sup_; }
  const Eigen::VectorXd& defect_table() const { return defect_table_; }

 private:
  void profile_derivs(double t, double* g) const;

  std::shared_ptr<const Profile> base_;
  double Lambda_;
  double defect_sup_ = 0.0;
  Eigen::VectorXd defect_table_;
};

struct JTable {
  Eigen::VectorXd t, J, dJ;
  double dt = 0.0;
  double ode_residual = 0.0;
  double parity_defect = 0.0;
  double w3_identity = 0.0;  // integral of W'''(H) J H'^2
};

JTable solve_j(const Profile& p);

struct Interaction {
  double value = 0.0;
  double asymptote = 0.0;
  double error = 0.0;
};

// Integral of (W''(H(t)) - 2) H'(t - T) H'(t) and its leading asymptote -4 sqrt2 A0^2 e^{-sqrt2 T}.
Interaction interaction_integral(const Profile& p, double T);
// Same with W'' replaced by w2.
Interaction interaction_integral(const Profile& p, double T, const std::function<double(double)>& w2);

// Columns t, H, dH, d2H, J.
void write_profile_csv(const std::string& path, const Profile& p, const JTable* j);

}  // namespace aclab
