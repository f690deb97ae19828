#pragma once

#include <functional>
#include <memory>
#include <string>

namespace aclab {

struct DoubleWell {
  // eval(k, t) = d^k W / dt^k (t), k in 0..3
  std::function<double(int, double)> eval;
  bool is_standard = false;
  std::string label;
};

using WellPtr = std::shared_ptr<const DoubleWell>;

inline WellPtr share_well(DoubleWell w) { return std::make_shared<const DoubleWell>(std::move(w)); }

// W = (1 - t^2)^2 / 4
DoubleWell standard_well();

// W = (1 - t^2)^2 (1 + c (1 - t^2)) / 4, a non-quartic even well with W''(+-1) = 2 (c >= 0).
DoubleWell sextic_well(double c);

// Tabulated (t, W) pairs, comma separated, one per line, strictly increasing t.
DoubleWell tabulated_well(const std::string& path);

// "standard", "sextic:<c>", or "custom:<path>". Validated before return.
DoubleWell well_from_id(const std::string& id);

double eval_w(const DoubleWell& well, int k, double t);

struct WellReport {
  bool ok = true;
  std::string failure;
  double min_w = 0.0;
  double w2_plus = 0.0;
  double w2_minus = 0.0;
  double parity_defect = 0.0;
};

// Checks the double-well invariants on a sample grid of n points.
WellReport check_well(const DoubleWell& well, int n = 10000, double w2_tol = 1e-10);

// Throws invalid-argument when check_well fails.
void validate_well(const DoubleWell& well, int n = 10000);

struct WellConstants {
  double h0 = 0.0;
  double h0_error = 0.0;
  double A0 = 0.0;
  double A0_minus = 0.0;
  double fit_residual_plus = 0.0;
  double fit_residual_minus = 0.0;
};

// h0 by adaptive quadrature of sqrt(2W) on [-1, 1].
double h0_quadrature(const DoubleWell& well, double quad_tol, double* achieved_error = nullptr);

// h0 and the tail constant A0 (fit on the solved profile over [t_lo, t_hi]).
WellConstants well_constants(const DoubleWell& well, double quad_tol, double t_lo = 4.0,
                             double t_hi = 8.0);

}  // namespace aclab
