#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

namespace aclab {

struct EigResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, M-orthonormal
  Eigen::VectorXd residuals;  // |A v - lambda M v| / |M v|
  std::string method;
  int iterations = 0;
};

// Lowest k eigenpairs of A v = lambda M v with M = diag(mass) > 0 and A symmetric.
// Dense below dense_limit unknowns, shift-invert Lanczos with full reorthogonalization above.
EigResult lowest_eigs(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& mass, int k,
                      double lower_bound, double tol = 1e-9, int dense_limit = 1500);

EigResult lowest_eigs_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass, int k);

}  // namespace aclab
