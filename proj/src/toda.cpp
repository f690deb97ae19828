#include "aclab/toda.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/error.hpp"
#include "aclab/layers.hpp"

namespace aclab {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double leaf_a(const WarpedMetric& m, double y) { return m.at(0, {y, 0.0}, 0.0).a; }

// Tridiagonal (periodic: cyclic) discretization of L_g on base nodes.
struct GapOperator {
  std::vector<double> lo, di, up;  // row i couples i-1, i, i+1
};

GapOperator gap_operator(const BaseGrid& b, const WarpedMetric& m, const Eigen::VectorXd& g) {
  const int n = b.n[0];
  const double h = b.h(0);
  GapOperator op;
  op.lo.assign(n, 0.0);
  op.di.assign(n, 0.0);
  op.up.assign(n, 0.0);
  auto face = [&](int i) {  // coefficient on face i + 1/2
    const int ip = b.periodic ? (i + 1) % n : i + 1;
    const double y = b.node(i)[0] + 0.5 * h;
    const double a = leaf_a(m, y);
    const double s = (g[ip] - g[i]) / h;
    const double W = std::sqrt(1.0 + s * s / (a * a));
    return a / (W * a * a);
  };
  for (int i = 0; i < n; ++i) {
    if (!b.periodic && (i == 0 || i == n - 1)) continue;
    const int im = b.periodic ? (i + n - 1) % n : i - 1;
    const double cr = face(i), cl = face(im);
    const double ai = leaf_a(m, b.node(i)[0]);
    op.lo[i] = cl / (ai * h * h);
    op.up[i] = cr / (ai * h * h);
    op.di[i] = -(cl + cr) / (ai * h * h);
  }
  return op;
}

}  // namespace

TodaConfig make_toda(const BaseGrid& base, const WarpedMetric& metric, double eps,
                     const std::vector<Eigen::VectorXd>& sheets, double A0, double h0) {
  if (base.dim != 1) fail(ErrorKind::InvalidArgument, "the sheet system is implemented on one-dimensional bases");
  TodaConfig c;
  c.base = base;
  c.metric = metric;
  c.sheets = sheets;
  c.eps = eps;
  c.A0 = A0;
  c.h0 = h0;
  c.V.resize(base.n[0]);
  for (int i = 0; i < base.n[0]; ++i) c.V[i] = metric.potential(base.node(i), 0.0);
  for (std::size_t l = 0; l < sheets.size(); ++l) {
    if (sheets[l].size() != base.n[0]) fail(ErrorKind::InvalidArgument, "sheet size mismatch");
    if (l > 0 && (sheets[l] - sheets[l - 1]).minCoeff() <= 0.0)
      fail(ErrorKind::InvalidArgument, "sheets must be strictly ordered");
  }
  return c;
}

std::vector<Eigen::VectorXd> toda_rhs(const TodaConfig& c) {
  const int Q = c.Q(), n = c.base.n[0];
  std::vector<Eigen::VectorXd> out(Q, Eigen::VectorXd::Zero(n));
  for (int l = 0; l < Q; ++l)
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      if (l > 0) v += std::exp(-kSqrt2 * std::abs(c.sheets[l][i] - c.sheets[l - 1][i]) / c.eps);
      if (l + 1 < Q) v -= std::exp(-kSqrt2 * std::abs(c.sheets[l + 1][i] - c.sheets[l][i]) / c.eps);
      out[l][i] = c.K() * v;
    }
  return out;
}

double scalar_gap(double eps, double lambda, double K) {
  if (!(lambda > 0.0)) fail(ErrorKind::NoEquilibrium, "scalar balance needs a positive potential");
  // x = D/eps solves log(eps^2 lambda x) - log(2K) + sqrt2 x = 0, increasing in x
  auto F = [&](double x) { return std::log(eps * eps * lambda * x) - std::log(2.0 * K) + kSqrt2 * x; };
  double lo = 1e-12, hi = 1.0;
  while (F(hi) < 0.0) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = F(x);
    if (fx < 0.0) lo = x; else hi = x;
    double nx = x - fx / (1.0 / x + kSqrt2);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-16 * x) {
      x = nx;
      break;
    }
    x = nx;
  }
  return eps * x;
}

double separation_model(double eps) {
  const double L = std::abs(std::log(eps));
  return kSqrt2 * eps * L - eps * std::log(L) / kSqrt2;
}

double boundary_gap(double eps, double c) {
  return kSqrt2 * eps * std::abs(std::log(eps)) + eps * std::log(1.0 / c) / kSqrt2;
}

TodaConfig solve_equilibrium(const TodaConfig& c, double tol, TodaSolveReport* report) {
  const int Q = c.Q();
  const BaseGrid& b = c.base;
  const int n = b.n[0];
  TodaConfig out = c;
  if (Q < 2) return out;
  if (b.periodic && c.V.maxCoeff() <= 0.0)
    fail(ErrorKind::NoEquilibrium, "potential is nowhere positive; sheet repulsion cannot balance");
  const double eps = c.eps, K = c.K();
  const int G = Q - 1;
  std::vector<Eigen::VectorXd> g(G);
  for (int l = 0; l < G; ++l) g[l] = c.sheets[l + 1] - c.sheets[l];
  if (b.periodic) {
    double lam = c.V.mean();
    if (!(lam > 0.0)) lam = c.V.maxCoeff();
    for (int l = 0; l < G; ++l) g[l].setConstant(scalar_gap(eps, lam, K));
  } else {
    for (int l = 0; l < G; ++l)
      for (int i = 1; i < n - 1; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        g[l][i] = (1.0 - s) * g[l][0] + s * g[l][n - 1];
      }
  }
  std::vector<int> unk;
  for (int i = 0; i < n; ++i)
    if (b.periodic || (i > 0 && i < n - 1)) unk.push_back(i);
  const int U = static_cast<int>(unk.size());
  std::vector<int> slot(n, -1);
  for (int k = 0; k < U; ++k) slot[unk[k]] = k;
  auto E = [&](double x) { return std::exp(-kSqrt2 * x / eps); };
  auto residual = [&](const std::vector<Eigen::VectorXd>& gg, std::vector<GapOperator>& ops) {
    Eigen::VectorXd F(G * U);
    ops.clear();
    for (int l = 0; l < G; ++l) ops.push_back(gap_operator(b, c.metric, gg[l]));
    for (int l = 0; l < G; ++l)
      for (int k = 0; k < U; ++k) {
        const int i = unk[k];
        const int im = b.periodic ? (i + n - 1) % n : i - 1, ip = b.periodic ? (i + 1) % n : i + 1;
        const GapOperator& op = ops[l];
        const double Lg = op.lo[i] * gg[l][im] + op.di[i] * gg[l][i] + op.up[i] * gg[l][ip];
        double rhs = 2.0 * E(gg[l][i]);
        if (l > 0) rhs -= E(gg[l - 1][i]);
        if (l + 1 < G) rhs -= E(gg[l + 1][i]);
        F[l * U + k] = eps * (Lg + c.V[i] * gg[l][i]) - K * rhs;
      }
    return F;
  };
  std::vector<GapOperator> ops;
  Eigen::VectorXd F = residual(g, ops);
  double fn = F.cwiseAbs().maxCoeff();
  int it = 0;
  for (; it < 100 && fn > tol; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int l = 0; l < G; ++l)
      for (int k = 0; k < U; ++k) {
        const int i = unk[k];
        const int im = b.periodic ? (i + n - 1) % n : i - 1, ip = b.periodic ? (i + 1) % n : i + 1;
        const int r = l * U + k;
        const GapOperator& op = ops[l];
        trip.emplace_back(r, r, eps * (op.di[i] + c.V[i]) + K * 2.0 * kSqrt2 / eps * E(g[l][i]));
        if (slot[im] >= 0) trip.emplace_back(r, l * U + slot[im], eps * op.lo[i]);
        if (slot[ip] >= 0) trip.emplace_back(r, l * U + slot[ip], eps * op.up[i]);
        if (l > 0) trip.emplace_back(r, (l - 1) * U + k, -K * kSqrt2 / eps * E(g[l - 1][i]));
        if (l + 1 < G) trip.emplace_back(r, (l + 1) * U + k, -K * kSqrt2 / eps * E(g[l + 1][i]));
      }
    Eigen::SparseMatrix<double> Jm(G * U, G * U);
    Jm.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(Jm);
    if (lu.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "sheet system Jacobian is singular");
    const Eigen::VectorXd step = lu.solve(-F);
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      std::vector<Eigen::VectorXd> trial = g;
      bool positive = true;
      for (int l = 0; l < G; ++l)
        for (int k = 0; k < U; ++k) {
          trial[l][unk[k]] += t * step[l * U + k];
          positive = positive && trial[l][unk[k]] > 0.0;
        }
      if (!positive) continue;
      std::vector<GapOperator> tops;
      const Eigen::VectorXd Ft = residual(trial, tops);
      const double ftn = Ft.cwiseAbs().maxCoeff();
      if (std::isfinite(ftn) && ftn < fn * (1.0 - 1e-4 * t)) {
        g = trial;
        F = Ft;
        ops = tops;
        fn = ftn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(fn <= tol)) {
    std::ostringstream os;
    os << "sheet equilibrium did not converge, residual " << fn;
    fail(ErrorKind::NumericFailure, os.str());
  }
  for (int l = 0; l < G; ++l) out.sheets[l + 1] = out.sheets[l] + g[l];
  if (report) {
    report->iterations = it;
    report->residual = fn;
    report->dropped_terms = 0.0;
    for (int l = 0; l + 1 < G; ++l)
      for (int i = 0; i < n; ++i)
        report->dropped_terms = std::max(report->dropped_terms, K * E(g[l][i] + g[l + 1][i]));
  }
  return out;
}

SeparationLaw separation_law(double lambda, const std::vector<double>& eps_list, double K) {
  if (eps_list.size() < 4) fail(ErrorKind::InvalidArgument, "separation law needs at least four eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) fail(ErrorKind::InvalidArgument, "eps list must be decreasing");
  SeparationLaw law;
  double num = 0.0, den = 0.0;
  for (double eps : eps_list) {
    SeparationRow r;
    r.eps = eps;
    r.D = scalar_gap(eps, lambda, K);
    r.model = separation_model(eps);
    r.excess = r.D - r.model;
    r.excess_over_eps = r.excess / eps;
    const double L = std::abs(std::log(eps));
    r.excess_over_loglog = r.excess / (eps * std::log(L));
    r.exp_ratio = std::exp(-kSqrt2 * r.D / eps) / (eps * eps * L);
    num += r.excess * eps;
    den += eps * eps;
    law.c_bound = std::max(law.c_bound, std::abs(r.excess_over_eps));
    law.rows.push_back(r);
  }
  law.c_fit = num / den;
  double s = 0.0;
  for (const auto& r : law.rows) s += std::pow(r.excess_over_eps - law.c_fit, 2);
  law.fit_rms = std::sqrt(s / law.rows.size());
  return law;
}

std::vector<JacobiExtraction> extract_jacobi(const std::vector<PhaseField>& fields) {
  std::vector<JacobiExtraction> out;
  for (const PhaseField& f : fields) {
    const LayerStack st = nodal_layers(f);
    if (st.Q != 2) fail(ErrorKind::InvalidArgument, "Jacobi extraction needs exactly two layers");
    const FieldGrid& g = f.grid();
    const BaseGrid& b = g.base;
    const WarpedMetric& m = f.setup->metric;
    const int n = g.ny();
    const double h = g.hy();
    JacobiExtraction r;
    r.eps = f.eps;
    const Eigen::VectorXd gap = st.f[1] - st.f[0];
    r.fhat = gap / gap.maxCoeff();
    auto central = [&](int i) {
      if (b.periodic) return true;
      const double s = g.y(i) / b.L[0];
      return s >= 0.15 - 1e-12 && s <= 0.85 + 1e-12 && i > 0 && i < n - 1;
    };
    double sup = 0.0, inf = 1e300;
    for (int i = 0; i < n; ++i) {
      if (!central(i)) continue;
      sup = std::max(sup, r.fhat[i]);
      inf = std::min(inf, r.fhat[i]);
      const int im = b.periodic ? (i + n - 1) % n : i - 1, ip = b.periodic ? (i + 1) % n : i + 1;
      const double ai = leaf_a(m, g.y(i));
      const double ar = leaf_a(m, g.y(i) + 0.5 * h), al = leaf_a(m, g.y(i) - 0.5 * h);
      const double lap = ((r.fhat[ip] - r.fhat[i]) / ar - (r.fhat[i] - r.fhat[im]) / al) / (ai * h * h);
      const double V = m.potential({g.y(i), 0.0}, 0.0);
      r.residual = std::max(r.residual, std::abs(lap + V * r.fhat[i]));
    }
    r.harnack = sup / inf;
    const double scale = f.eps * std::abs(std::log(f.eps));
    for (int l = 0; l < 2; ++l) {
      const Eigen::VectorXd H = graph_mean_curvature(m, b, st.f[l]);
      for (int i = 0; i < n; ++i)
        if (central(i)) r.curvature = std::max(r.curvature, std::abs(H[i]) / scale);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace aclab
