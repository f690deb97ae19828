#pragma once

#include <Eigen/Dense>
#include <string>

#include "aclab/eigs.hpp"
#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/heteroclinic.hpp"
#include "aclab/layers.hpp"

namespace aclab {

// zeta -> -eps Delta_h zeta + W''(u) zeta / eps at every node (Delta_h = -S/w).
Eigen::VectorXd second_variation_apply(const PhaseField& f, const Eigen::VectorXd& zeta);
// eps zeta^T S zeta + sum w W''(u) zeta^2 / eps
double quadratic_form(const PhaseField& f, const Eigen::VectorXd& zeta);

// 1e-6 times the spectral scale W''(1)/eps of the operator on u = 1.
double default_zero_tol(double eps);

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd vectors;  // full-grid (or base-grid) columns
  int index = 0;
  int nullity = 0;
  double zero_tol = 0.0;
  std::string method;
  int iterations = 0;
};

void classify(SpectrumReport& r);

// Lowest k eigenpairs of the second variation in the w-weighted inner product (Dirichlet nodes clamped).
SpectrumReport morse_index(const PhaseField& f, int k, double zero_tol);

// Lowest k eigenpairs of J_Sigma on the z = 0 leaf of a closed base.
SpectrumReport surface_index(const WarpedMetric& m, const BaseGrid& b, int k, double zero_tol);

struct TranslationMode {
  double literal_residual = 0.0;  // |B(D_z u)| / |D_z u| in the weighted norm
  double eigen_residual = 0.0;    // residual of the lowest returned pair
  double overlap = 0.0;           // |<v0, D_z u>| / (|v0| |D_z u|)
  double lowest = 0.0;
};

TranslationMode translation_mode(const PhaseField& f, const SpectrumReport& r);

struct LiftedForm {
  double q_u = 0.0;       // Q_u(psi, psi)
  double scaled = 0.0;    // Q_u / (eps^2 h0)
  double surface = 0.0;   // int |f'|^2 - V f^2 over the z = 0 leaf
  double difference = 0.0;
  double ratio = 0.0;
};

// psi = fb(y) Hbar'((z - f_1(y) - h_1(y)) / eps); requires a one-sheet stack.
LiftedForm lifted_form(const PhaseField& f, const LayerStack& stack, const Eigen::VectorXd& fb,
                       const TruncatedProfile& trunc, double h0);

struct Projection {
  Eigen::VectorXd pi;    // base function
  Eigen::VectorXd perp;  // grid function
  double norm = 0.0;     // discrete int H'(z/eps)^2 dz / eps, nominally h0
};

// Pi v = int v H'(z/eps) dz / int H'(z/eps)^2 dz per column; the discrete normalization makes Pi Pi_perp = 0 exact.
Projection project(const FieldGrid& g, const Eigen::VectorXd& v, double eps, const Profile& p);

struct StabilityTerms {
  double lhs = 0.0;        // int zeta^2 [e^{-sqrt2|d_{l-1}|/eps} + e^{-sqrt2|d_{l+1}|/eps}]
  double gradient = 0.0;   // int eps^2 |grad zeta|^2
  double mass = 0.0;       // int zeta^2
  double s_kappa = 0.0;    // sum_m sup e^{-sqrt2(1+kappa) D_m/eps} near supp zeta
  double ratio = 0.0;      // lhs / (gradient + (eps^2 + s_kappa) mass)
  double eps = 0.0;
};

// Integrals over sheet l of the stack (graph measure), zeta on the base nodes vanishing at the base ends.
StabilityTerms stability_terms(const PhaseField& f, const LayerStack& stack, int l, const Eigen::VectorXd& zeta,
                               double kappa = 0.1);

struct StabilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = true;
};

// rhs = c' int eps^2|grad zeta|^2 + c'(eps^2 + s_kappa) int zeta^2
StabilityCheck stability_check(const StabilityTerms& t, double c_prime);

}  // namespace aclab
