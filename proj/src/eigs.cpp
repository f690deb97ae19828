#include "aclab/eigs.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/error.hpp"

namespace aclab {

namespace {

EigResult finish(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& mass, const Eigen::VectorXd& lam,
                 const Eigen::MatrixXd& Y) {
  // Y holds eigenvectors of M^{-1/2} A M^{-1/2}; map back to M-orthonormal vectors.
  const Eigen::VectorXd isq = mass.cwiseSqrt().cwiseInverse();
  EigResult r;
  r.values = lam;
  r.vectors = isq.asDiagonal() * Y;
  r.residuals.resize(lam.size());
  for (int c = 0; c < lam.size(); ++c) {
    const Eigen::VectorXd v = r.vectors.col(c);
    const Eigen::VectorXd Mv = mass.cwiseProduct(v);
    r.residuals[c] = (A * v - lam[c] * Mv).norm() / Mv.norm();
  }
  return r;
}

}  // namespace

EigResult lowest_eigs_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass, int k) {
  const int n = static_cast<int>(A.rows());
  const Eigen::VectorXd isq = mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B = isq.asDiagonal() * A * isq.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "dense eigensolver failed");
  k = std::min(k, n);
  EigResult r = finish(A.sparseView(), mass, es.eigenvalues().head(k), es.eigenvectors().leftCols(k));
  r.method = "dense";
  return r;
}

EigResult lowest_eigs(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& mass, int k, double lower_bound,
                      double tol, int dense_limit) {
  const int n = static_cast<int>(A.rows());
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  if (n <= dense_limit) return lowest_eigs_dense(Eigen::MatrixXd(A), mass, k);

  const Eigen::VectorXd isq = mass.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> B = isq.asDiagonal() * A * isq.asDiagonal();
  const double sigma = lower_bound - 1.0 - 1e-3 * std::abs(lower_bound);
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SparseMatrix<double> shifted = B - sigma * I;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "shift-invert factorization failed");

  int m = std::min(n, std::max(4 * k + 40, 80));
  Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) start[i] += 0.5 * std::sin(1.0 + 0.37 * i);
  Eigen::VectorXd last_res;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXd Vb(n, m + 1);
    Eigen::VectorXd alpha(m), beta(m);
    Vb.col(0) = start.normalized();
    int steps = m;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = solver.solve(Vb.col(j));
      alpha[j] = Vb.col(j).dot(w);
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass) w -= Vb.leftCols(j + 1) * (Vb.leftCols(j + 1).transpose() * w);
      beta[j] = w.norm();
      if (beta[j] < 1e-14 * std::abs(alpha[j]) || j + 1 == n) {
        steps = j + 1;
        break;
      }
      Vb.col(j + 1) = w / beta[j];
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int kk = std::min(k, steps);
    // largest theta = lowest lambda
    Eigen::VectorXd lam(kk);
    Eigen::MatrixXd Y(n, kk);
    for (int c = 0; c < kk; ++c) {
      const int idx = steps - 1 - c;
      lam[c] = sigma + 1.0 / es.eigenvalues()[idx];
      Y.col(c) = (Vb.leftCols(steps) * es.eigenvectors().col(idx)).normalized();
    }
    // Rayleigh-quotient polish keeps the values consistent with the vectors
    for (int c = 0; c < kk; ++c) lam[c] = Y.col(c).dot(B * Y.col(c));
    EigResult r = finish(A, mass, lam, Y);
    r.method = "lanczos-shift-invert";
    r.iterations = steps;
    last_res = r.residuals;
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    if (r.residuals.maxCoeff() <= tol * scale || steps == n) return r;
    m = std::min(n, 2 * m);
    start = Y.rowwise().sum();
  }
  std::ostringstream os;
  os << "Lanczos did not converge; Ritz residuals:";
  for (int i = 0; i < last_res.size(); ++i) os << ' ' << last_res[i];
  fail(ErrorKind::NumericFailure, os.str());
}

}  // namespace aclab
