#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/heteroclinic.hpp"

namespace aclab {

// Profile on [-32, 32], wide enough for Lambda = 3|log eps| down to eps ~ 4e-3. Cached for the standard well.
std::shared_ptr<const Profile> layer_profile(WellPtr well);

// Lambda = 3|log eps|
std::shared_ptr<const TruncatedProfile> layer_truncation(WellPtr well, double eps);

struct LayerStack {
  int Q = 0;
  std::vector<Eigen::VectorXd> f;   // sheet heights over the base nodes, f_1 < ... < f_Q
  std::vector<Eigen::VectorXd> h;   // offsets
  std::vector<Eigen::VectorXd> D;   // distance to the nearest neighbouring sheet
  std::vector<double> slope_sup;    // discrete C^1 size of each sheet
  Eigen::VectorXd phi;              // u - U[h]
  double orth_residual = 0.0;
  double phi_sup = 0.0;
  double h_sup_over_eps = 0.0;
  int sweeps = 0;
};

// Signed distance to the graph of fs (positive above): exact for constant sheets and flat metrics,
// first-order normal estimate (z - f)/sqrt(1 + f'^2/a^2) otherwise.
Eigen::VectorXd signed_distance(const FieldSetup& s, const Eigen::VectorXd& fs);

// U[h] = ((-1)^{Q+1} - 1)/2 + sum_l Hbar((-1)^{l-1}(d_l - h_l)/eps).
PhaseField superpose(SetupPtr setup, const TruncatedProfile& trunc, double eps,
                     const std::vector<Eigen::VectorXd>& sheets, const std::vector<Eigen::VectorXd>& offsets);

// Per-column roots of u = 0 by local quintic interpolation; throws topology if column crossing counts differ.
LayerStack nodal_layers(const PhaseField& f);

// Solves the per-column orthogonality relation for h_l and fills phi.
LayerStack fit_offsets(const PhaseField& f, const LayerStack& stack, const TruncatedProfile& trunc);

struct EnhancedReport {
  double sup = 0.0;
  double sff_sup = 0.0;
  double dominance_defect = 0.0;  // max(|sff|^2 - |A|^2, 0)
  int samples = 0;
  std::vector<double> values;
};

// |A| = |Hess u - Hess u(., nu) (x) nu| / |grad u| on {|u| <= 1 - beta}.
EnhancedReport enhanced_sff(const PhaseField& f, double beta);

}  // namespace aclab
