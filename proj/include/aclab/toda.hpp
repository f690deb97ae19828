#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/geometry.hpp"

namespace aclab {

struct TodaConfig {
  BaseGrid base;
  WarpedMetric metric;
  std::vector<Eigen::VectorXd> sheets;  // f_1 < ... < f_Q on the base nodes
  double eps = 0.1;
  Eigen::VectorXd V;  // |sff|^2 + Ric(dz, dz) on the base nodes
  double A0 = 2.0;
  double h0 = 2.0 * 1.4142135623730951 / 3.0;

  int Q() const { return static_cast<int>(sheets.size()); }
  double K() const { return 4.0 * A0 * A0 / h0; }
};

// V taken from the metric on the z = 0 leaf.
TodaConfig make_toda(const BaseGrid& base, const WarpedMetric& metric, double eps,
                     const std::vector<Eigen::VectorXd>& sheets, double A0, double h0);

// K (e^{-sqrt2|d_{l-1}|/eps} - e^{-sqrt2|d_{l+1}|/eps}) with vertical distances.
std::vector<Eigen::VectorXd> toda_rhs(const TodaConfig& c);

struct TodaSolveReport {
  int iterations = 0;
  double residual = 0.0;
  double dropped_terms = 0.0;  // size of the next-nearest interactions left out of the solve
};

// Newton for the gaps g_l = f_{l+1} - f_l in
//   eps (L_g + V) g_l = K (2 e^{-sqrt2 g_l/eps} - e^{-sqrt2 g_{l+1}/eps} - e^{-sqrt2 g_{l-1}/eps}),
// L_g phi = a^{-1} (a W^{-1} phi' / a^2)' with W = sqrt(1 + g'^2/a^2) refreshed every step.
// Interval bases keep the input gaps at the two ends. The lowest sheet is kept, the others are rebuilt.
TodaConfig solve_equilibrium(const TodaConfig& c, double tol, TodaSolveReport* report = nullptr);

// D with eps lambda D = 2K e^{-sqrt2 D/eps}.
double scalar_gap(double eps, double lambda, double K);
// sqrt2 eps|log eps| - (1/sqrt2) eps log|log eps|
double separation_model(double eps);

struct SeparationRow {
  double eps = 0.0, D = 0.0, model = 0.0, excess = 0.0, excess_over_eps = 0.0;
  double excess_over_loglog = 0.0;  // excess / (eps log|log eps|)
  double exp_ratio = 0.0;           // e^{-sqrt2 D/eps} / (eps^2 |log eps|)
};

struct SeparationLaw {
  std::vector<SeparationRow> rows;
  double c_fit = 0.0;      // least-squares c in D - model = c eps
  double fit_rms = 0.0;    // rms of (excess - c eps)/eps
  double c_bound = 0.0;    // max |excess|/eps
};

SeparationLaw separation_law(double lambda, const std::vector<double>& eps_list, double K);

// Gap of the Dirichlet two-sheet boundary data: sqrt2 eps|log eps| + (eps/sqrt2) log(1/c), so e^{-sqrt2 D/eps} = c eps^2.
double boundary_gap(double eps, double c);

struct JacobiExtraction {
  double eps = 0.0;
  Eigen::VectorXd fhat;
  double harnack = 0.0;      // sup fhat / inf fhat over the central region
  double residual = 0.0;     // sup |(Delta + V) fhat| over the central region
  double curvature = 0.0;    // sup |H_Gamma| / (eps |log eps|)
};

// Two-layer fields, one per eps; the central region drops 15% of the base at each end of an interval.
std::vector<JacobiExtraction> extract_jacobi(const std::vector<PhaseField>& fields);

}  // namespace aclab
