#include "aclab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aclab/error.hpp"
#include "aclab/layers.hpp"

namespace aclab {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Trip = Eigen::Triplet<double>;

// sup |S^(m)| for the quintic smoothstep S = 6x^5 - 15x^4 + 10x^3
const double kStepSup[4] = {1.0, 15.0 / 8.0, 10.0 / std::sqrt(3.0), 60.0};

double step(int k, double x) {
  switch (k) {
    case 0: return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    case 1: return 30.0 * x * x * (1.0 - x) * (1.0 - x);
    case 2: return 60.0 * x - 180.0 * x * x + 120.0 * x * x * x;
    case 3: return 60.0 - 360.0 * x + 360.0 * x * x;
    default: fail(ErrorKind::InvalidArgument, "cutoff derivative order must be 0..3");
  }
}

// Second-order first and second differences on a uniform line, one-sided at the ends.
Eigen::VectorXd d1(const Eigen::VectorXd& f, double h) {
  const int n = static_cast<int>(f.size());
  Eigen::VectorXd g(n);
  if (n < 3) return Eigen::VectorXd::Zero(n);
  for (int k = 1; k + 1 < n; ++k) g[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return g;
}

Eigen::VectorXd d2(const Eigen::VectorXd& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 4) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g(n);
  for (int k = 1; k + 1 < n; ++k) g[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
  g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
  g[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
  return g;
}

// Grid function as an ny x nz matrix (row i is the column over base node i).
using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Grid as_grid(const FieldGrid& g, const Eigen::VectorXd& v) {
  return Eigen::Map<const Grid>(v.data(), g.ny(), g.nz);
}

Grid diff_y(const Grid& f, double h, int order) {
  Grid out(f.rows(), f.cols());
  for (int j = 0; j < f.cols(); ++j) {
    const Eigen::VectorXd col = f.col(j);
    out.col(j) = order == 1 ? d1(col, h) : d2(col, h);
  }
  return out;
}

Grid diff_s(const Grid& f, double h, int order) {
  Grid out(f.rows(), f.cols());
  for (int i = 0; i < f.rows(); ++i) {
    const Eigen::VectorXd row = f.row(i).transpose();
    out.row(i) = (order == 1 ? d1(row, h) : d2(row, h)).transpose();
  }
  return out;
}

// Max over axis-aligned pairs within reach of |T(p) - T(q)| / |p - q|^alpha for a tensor field.
double holder_seminorm(const std::vector<Grid>& comps, const std::vector<double>& wts, double hy, double hs,
                       double reach, double alpha) {
  const int ny = static_cast<int>(comps[0].rows()), nz = static_cast<int>(comps[0].cols());
  double best = 0.0;
  auto pair = [&](int i0, int j0, int i1, int j1, double d) {
    double acc = 0.0;
    for (size_t c = 0; c < comps.size(); ++c) {
      const double e = comps[c](i0, j0) - comps[c](i1, j1);
      acc += wts[c] * e * e;
    }
    best = std::max(best, std::sqrt(acc) / std::pow(d, alpha));
  };
  const int my = std::max(1, static_cast<int>(std::floor(reach / hy + 1e-9)));
  const int ms = std::max(1, static_cast<int>(std::floor(reach / hs + 1e-9)));
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      for (int m = 1; m <= my && i + m < ny; ++m) pair(i, j, i + m, j, m * hy);
      for (int m = 1; m <= ms && j + m < nz; ++m) pair(i, j, i, j + m, m * hs);
    }
  return best;
}

double lagrange4(const double* f, double x) {
  // nodes 0, 1, 2, 3; x in node units
  const double a = x, b = x - 1.0, c = x - 2.0, d = x - 3.0;
  return -f[0] * b * c * d / 6.0 + f[1] * a * c * d / 2.0 - f[2] * a * b * d / 2.0 + f[3] * a * b * c / 6.0;
}

// Cubic interpolation of a uniform column (origin z0, spacing h) at z.
double interp_column(const double* col, int n, double z0, double h, double z) {
  const double x = (z - z0) / h;
  int k = static_cast<int>(std::floor(x)) - 1;
  k = std::clamp(k, 0, n - 4);
  return lagrange4(col + k, x - k);
}

// Conservative coefficients: sqrt|G| at nodes, y-face fluxes (i + 1/2, j), s-face fluxes (i, j + 1/2).
struct Coeffs {
  Grid sqrtG;
  Grid yy, ys_y;  // (ny - 1) x nz
  Grid ss, ys_s;  // ny x (nz - 1)
};

SpMat assemble_laplacian(const FieldGrid& g, const Coeffs& k) {
  const int ny = g.ny(), nz = g.nz;
  const double hy = g.hy(), hs = g.hz();
  std::vector<Trip> trip;
  trip.reserve(static_cast<size_t>(g.size()) * 13);
  for (int i = 1; i + 1 < ny; ++i)
    for (int j = 1; j + 1 < nz; ++j) {
      const int p = g.index(i, j);
      const double inv = 1.0 / k.sqrtG(i, j);
      auto add = [&](int ii, int jj, double v) { trip.emplace_back(p, g.index(ii, jj), v * inv); };
      for (int sg : {1, -1}) {
        const int in = i + sg, fi = sg > 0 ? i : i - 1;
        const double ayy = k.yy(fi, j), ays = k.ys_y(fi, j);
        add(in, j, ayy / (hy * hy));
        add(i, j, -ayy / (hy * hy));
        const double m = sg * ays / (4.0 * hy * hs);
        add(i, j + 1, m);
        add(in, j + 1, m);
        add(i, j - 1, -m);
        add(in, j - 1, -m);
      }
      for (int sg : {1, -1}) {
        const int jn = j + sg, fj = sg > 0 ? j : j - 1;
        const double ass = k.ss(i, fj), ays = k.ys_s(i, fj);
        add(i, jn, ass / (hs * hs));
        add(i, j, -ass / (hs * hs));
        const double m = sg * ays / (4.0 * hy * hs);
        add(i + 1, j, m);
        add(i + 1, jn, m);
        add(i - 1, j, -m);
        add(i - 1, jn, -m);
      }
    }
  SpMat L(g.size(), g.size());
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

Eigen::VectorXd jacobi_apply(const BarrierContext& c, const Eigen::VectorXd& zeta) {
  Eigen::VectorXd out = c.J * zeta;
  out[0] = 0.0;
  out[c.ny() - 1] = 0.0;
  return out;
}

struct Evaluation {
  Functionals f;
  Eigen::VectorXd T;  // eps^2 Delta_zeta F - W'(F) at interior nodes
};

Evaluation evaluate(const BarrierContext& c, const BarrierState& st, SignConvention sign) {
  const FieldGrid& g = c.grid;
  const int ny = g.ny(), nz = g.nz, n = g.size();
  const DoubleWell& W = *c.well;
  const double e2 = c.eps * c.eps;
  const SpMat lapZ = pulled_back_laplacian(c, st.zeta);

  Eigen::VectorXd Ht(n), chi3(n), chi4(n), psi(n), w2H(n), w2Ht(n);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      const int p = g.index(i, j);
      Ht[p] = c.Ht[j];
      chi3[p] = c.chi_s[3][j];
      chi4[p] = c.chi_s[4][j];
      psi[p] = c.psi[j];
      w2H[p] = W.eval(2, c.H[j]);
      w2Ht[p] = W.eval(2, c.Ht[j]);
    }
  const Eigen::VectorXd chi4vs = chi4.cwiseProduct(st.v_sharp);
  const Eigen::VectorXd w = chi4vs + st.v_flat;

  Evaluation ev;
  Functionals& f = ev.f;
  f.E = e2 * (lapZ * Ht);
  f.Q.resize(n);
  Eigen::VectorXd F = Ht + w, T = e2 * (lapZ * F);
  for (int p = 0; p < n; ++p) {
    f.E[p] -= W.eval(1, Ht[p]);
    f.Q[p] = W.eval(1, Ht[p] + w[p]) - W.eval(1, Ht[p]) - w2Ht[p] * w[p];
    T[p] -= W.eval(1, F[p]);
  }
  const Eigen::VectorXd D0 = e2 * (lapZ * st.v_flat - c.lap0 * st.v_flat);
  const Eigen::VectorXd DP = e2 * (lapZ * st.v_sharp - c.lapP * st.v_sharp);
  const Eigen::VectorXd C = e2 * (lapZ * chi4vs - chi4.cwiseProduct(lapZ * st.v_sharp));
  const Eigen::VectorXd Jz = jacobi_apply(c, st.zeta);
  Eigen::VectorXd Jpsi(n);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) Jpsi[g.index(i, j)] = c.eps * Jz[i] * c.psi[j];

  const Eigen::VectorXd lin = (w2Ht.array() - c.w2_pm).matrix().cwiseProduct(st.v_flat);
  if (sign == SignConvention::consistent) {
    const Eigen::VectorXd X = f.E + D0 - lin - f.Q;
    f.N = (chi4.array() - 1.0).matrix().cwiseProduct(X) - C;
    f.M = chi3.cwiseProduct(-DP - X + Jpsi);
  } else {
    const Eigen::VectorXd linH = (w2H.array() - c.w2_pm).matrix().cwiseProduct(st.v_flat);
    f.N = (chi4.array() - 1.0).matrix().cwiseProduct(D0 + lin - f.E - f.Q) - C;
    f.M = chi3.cwiseProduct(-DP - D0 - f.E + Jpsi - f.Q + linH);
  }
  for (int p = 0; p < n; ++p)
    if (c.slot[p] < 0) f.E[p] = f.Q[p] = f.M[p] = f.N[p] = T[p] = 0.0;
  ev.T = T;
  return ev;
}

}  // namespace

double Cutoff::eval(int k, double t) const {
  const double w = width();
  const double x = (std::abs(t) - inner) / w;
  if (k == 0) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - step(0, x);
  }
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double sg = (t < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
  return -sg * step(k, x) / std::pow(w, k);
}

double Cutoff::weighted_norm(int order, double scale) const {
  if (order < 0 || order > 3) fail(ErrorKind::InvalidArgument, "cutoff norm order must be 0..3");
  double out = 0.0;
  for (int m = 0; m <= order; ++m) out += std::pow(scale / width(), m) * kStepSup[m];
  return out;
}

Cutoff cutoff(double eps, double delta_star, int j) {
  if (j < 1 || j > 5) fail(ErrorKind::InvalidArgument, "cutoff index must be 1..5");
  if (!(delta_star > 0.0 && delta_star < 1.0)) fail(ErrorKind::InvalidArgument, "delta_star must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  const double r = std::pow(eps, delta_star);
  return Cutoff{r * (1.0 - (2.0 * j - 1.0) / 100.0), r * (1.0 - (2.0 * j - 2.0) / 100.0)};
}

double barrier_spacing(double eps, double delta_star) {
  return std::min(eps / 8.0, 0.01 * std::pow(eps, delta_star) / 4.0);
}

FieldGrid barrier_grid(double eps, double delta_star, double L) {
  const int ny = static_cast<int>(std::ceil(L / (0.25 * eps) - 1e-9)) + 1;
  int nz = static_cast<int>(std::ceil(2.0 / barrier_spacing(eps, delta_star) - 1e-9)) + 1;
  if (nz % 2 == 0) ++nz;
  return make_field_grid(interval(ny, L), -1.0, 1.0, nz);
}

double offset_forward(const Cutoff& chi2, double zeta, double t) { return t - chi2.eval(0, t) * zeta; }

double offset_inverse(const Cutoff& chi2, double zeta, double s) {
  if (std::abs(zeta) * kStepSup[1] / chi2.width() >= 1.0)
    fail(ErrorKind::InvalidArgument, "offset map is not injective: |zeta| sup|chi_2'| >= 1");
  if (zeta == 0.0) return s;
  double lo = s - std::abs(zeta), hi = s + std::abs(zeta);
  double t = s + chi2.eval(0, s) * zeta;
  for (int it = 0; it < 100; ++it) {
    const double r = offset_forward(chi2, zeta, t) - s;
    if (r > 0.0) hi = std::min(hi, t);
    else lo = std::max(lo, t);
    if (std::abs(r) <= 1e-16 * std::max(1.0, std::abs(s))) break;
    double tn = t - r / (1.0 - chi2.eval(1, t) * zeta);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= 1e-17) {
      t = tn;
      break;
    }
    t = tn;
  }
  return t;
}

OffsetMap offset_map(const BarrierContext& c, const Eigen::VectorXd& zeta) {
  const FieldGrid& g = c.grid;
  const int ny = g.ny(), nz = g.nz;
  if (zeta.size() != ny) fail(ErrorKind::InvalidArgument, "zeta must live on the base nodes");
  const Eigen::VectorXd dz = d1(zeta, g.hy());
  const Cutoff& chi2 = c.chi[2];
  OffsetMap m;
  m.tau.resize(g.size());
  m.tau_s.resize(g.size());
  m.tau_y.resize(g.size());
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      const int p = g.index(i, j);
      const double t = offset_inverse(chi2, zeta[i], c.s[j]);
      const double d = 1.0 - chi2.eval(1, t) * zeta[i];
      m.tau[p] = t;
      m.tau_s[p] = 1.0 / d;
      m.tau_y[p] = chi2.eval(0, t) * dz[i] / d;
    }
  return m;
}

namespace {

struct PointGeometry {
  double sqrtG, Ayy, Ays, Ass;
};

PointGeometry point_geometry(const BarrierContext& c, double y, double zeta, double dzeta, double s) {
  const Cutoff& chi2 = c.chi[2];
  const double t = offset_inverse(chi2, zeta, s);
  if (t < c.metric.z_lo || t > c.metric.z_hi) fail(ErrorKind::OutOfChart, "D_zeta leaves the Fermi chart");
  const double d = 1.0 - chi2.eval(1, t) * zeta;
  const double ts = 1.0 / d, ty = chi2.eval(0, t) * dzeta / d;
  const double a = c.metric.at(0, {y, 0.0}, t).a;
  return {a * ts, ts / a, -ty / a, (a * a + ty * ty) / (a * ts)};
}

}  // namespace

SpMat pulled_back_laplacian(const BarrierContext& c, const Eigen::VectorXd& zeta) {
  const FieldGrid& g = c.grid;
  const int ny = g.ny(), nz = g.nz;
  if (zeta.size() != ny) fail(ErrorKind::InvalidArgument, "zeta must live on the base nodes");
  const double hy = g.hy();
  const Eigen::VectorXd dz = d1(zeta, hy);
  Coeffs k{Grid(ny, nz), Grid(ny - 1, nz), Grid(ny - 1, nz), Grid(ny, nz - 1), Grid(ny, nz - 1)};
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      k.sqrtG(i, j) = point_geometry(c, g.y(i), zeta[i], dz[i], c.s[j]).sqrtG;
      if (i + 1 < ny) {
        const PointGeometry q = point_geometry(c, g.y(i) + 0.5 * hy, 0.5 * (zeta[i] + zeta[i + 1]),
                                               (zeta[i + 1] - zeta[i]) / hy, c.s[j]);
        k.yy(i, j) = q.Ayy;
        k.ys_y(i, j) = q.Ays;
      }
      if (j + 1 < nz) {
        const PointGeometry q = point_geometry(c, g.y(i), zeta[i], dz[i], 0.5 * (c.s[j] + c.s[j + 1]));
        k.ss(i, j) = q.Ass;
        k.ys_s(i, j) = q.Ays;
      }
    }
  return assemble_laplacian(g, k);
}

BarrierContextPtr make_barrier_context(const FieldGrid& grid, const WarpedMetric& metric, WellPtr well,
                                       double eps, double delta_star, double alpha) {
  if (!well) fail(ErrorKind::InvalidArgument, "null well");
  if (grid.base.periodic || grid.base.dim != 1)
    fail(ErrorKind::InvalidArgument, "the barrier base must be a one-dimensional interval");
  if (grid.z_periodic || std::abs(grid.z_lo + 1.0) > 1e-14 || std::abs(grid.z_hi - 1.0) > 1e-14)
    fail(ErrorKind::InvalidArgument, "the barrier slab must be [-1, 1]");
  if (grid.nz % 2 == 0) fail(ErrorKind::InvalidArgument, "the slab needs an odd node count");
  if (grid.ny() < 5) fail(ErrorKind::InvalidArgument, "the base needs at least 5 nodes");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (metric.z_lo > -1.0 || metric.z_hi < 1.0) fail(ErrorKind::OutOfChart, "metric chart does not cover the slab");

  auto c = std::make_shared<BarrierContext>();
  c->grid = grid;
  c->metric = metric;
  c->well = well;
  c->eps = eps;
  c->delta_star = delta_star;
  c->alpha = alpha;
  for (int j = 1; j <= 5; ++j) c->chi[j] = cutoff(eps, delta_star, j);
  if (grid.hz() > 1.01 * barrier_spacing(eps, delta_star))
    fail(ErrorKind::InvalidArgument, "slab spacing does not resolve the cutoffs");
  c->profile = layer_profile(well);
  c->w2_pm = well->eval(2, 1.0);

  const int ny = grid.ny(), nz = grid.nz;
  const double hs = grid.hz();
  for (int i = 0; i < ny; ++i) {
    const double y = grid.y(i);
    if (std::abs(metric.H({y, 0.0}, 0.0)) > 1e-10)
      fail(ErrorKind::Precondition, "the z = 0 leaf is not minimal");
  }
  c->s.resize(nz);
  c->ws.resize(nz);
  c->Ht.resize(nz);
  c->H.resize(nz);
  c->psi.resize(nz);
  for (int j = 1; j <= 5; ++j) c->chi_s[j].resize(nz);
  for (int j = 0; j < nz; ++j) {
    // symmetric node values so that odd data is exactly orthogonal to psi
    const int jm = nz - 1 - j;
    const double s = j < jm ? -(grid.z_hi - grid.z_lo) * 0.5 + j * hs : (jm == j ? 0.0 : -(-1.0 + jm * hs));
    c->s[j] = s;
    c->ws[j] = (j == 0 || j == nz - 1) ? 0.5 * hs : hs;
    const double x = std::abs(s) / eps;
    const double Habs = c->profile->eval(0, x) - c->profile->eval(0, -x);
    c->H[j] = s < 0.0 ? -0.5 * Habs : 0.5 * Habs;
    c->psi[j] = 0.5 * (c->profile->eval(1, x) + c->profile->eval(1, -x));
    for (int k = 1; k <= 5; ++k) c->chi_s[k][j] = c->chi[k].eval(0, s);
    const double chi1 = c->chi_s[1][j];
    c->Ht[j] = chi1 * c->H[j] + (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) * (1.0 - chi1);
  }

  c->a0.resize(ny);
  c->V.resize(ny);
  for (int i = 0; i < ny; ++i) {
    c->a0[i] = metric.at(0, {grid.y(i), 0.0}, 0.0).a;
    c->V[i] = metric.potential({grid.y(i), 0.0}, 0.0);
  }

  c->slot.assign(grid.size(), -1);
  for (int i = 1; i + 1 < ny; ++i)
    for (int j = 1; j + 1 < nz; ++j) {
      c->slot[grid.index(i, j)] = static_cast<int>(c->interior.size());
      c->interior.push_back(grid.index(i, j));
    }

  c->lap0 = pulled_back_laplacian(*c, Eigen::VectorXd::Zero(ny));
  {
    const double hy = grid.hy();
    Coeffs k{Grid(ny, nz), Grid(ny - 1, nz), Grid::Zero(ny - 1, nz), Grid(ny, nz - 1), Grid::Zero(ny, nz - 1)};
    for (int i = 0; i < ny; ++i) {
      const double af = i + 1 < ny ? metric.at(0, {grid.y(i) + 0.5 * hy, 0.0}, 0.0).a : 1.0;
      for (int j = 0; j < nz; ++j) {
        k.sqrtG(i, j) = c->a0[i];
        if (i + 1 < ny) k.yy(i, j) = 1.0 / af;
        if (j + 1 < nz) k.ss(i, j) = c->a0[i];
      }
    }
    c->lapP = assemble_laplacian(grid, k);
  }

  const double e2 = eps * eps;
  const int ni = static_cast<int>(c->interior.size());
  {
    std::vector<Trip> trip;
    for (int r = 0; r < ni; ++r) {
      const int p = c->interior[r];
      for (SpMat::InnerIterator it(c->lap0, p); it; ++it) {
        const int q = c->slot[it.col()];
        if (q >= 0) trip.emplace_back(r, q, e2 * it.value());
      }
      trip.emplace_back(r, r, -c->w2_pm);
    }
    Eigen::SparseMatrix<double> A(ni, ni);
    A.setFromTriplets(trip.begin(), trip.end());
    c->calL = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    c->calL->compute(A);
    if (c->calL->info() != Eigen::Success) fail(ErrorKind::NumericFailure, "factorization of the far-field operator failed");
  }
  {
    const int nv = (ny - 2) * (nz - 2);
    c->sharp_unknowns = nv;
    c->sharp_slot.assign(grid.size(), -1);
    for (int i = 1; i + 1 < ny; ++i)
      for (int j = 1; j + 1 < nz; ++j) c->sharp_slot[grid.index(i, j)] = (i - 1) * (nz - 2) + (j - 1);
    std::vector<Trip> trip;
    for (int i = 1; i + 1 < ny; ++i)
      for (int j = 1; j + 1 < nz; ++j) {
        const int p = grid.index(i, j);
        const int r = c->sharp_slot[p];
        for (SpMat::InnerIterator it(c->lapP, p); it; ++it) {
          const int q = c->sharp_slot[it.col()];
          if (q >= 0) trip.emplace_back(r, q, e2 * it.value());
        }
        trip.emplace_back(r, r, -well->eval(2, c->H[j]));
      }
    Eigen::SparseMatrix<double> A(nv, nv);
    A.setFromTriplets(trip.begin(), trip.end());
    c->sharpL = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    c->sharpL->compute(A);
    if (c->sharpL->info() != Eigen::Success) fail(ErrorKind::NumericFailure, "factorization of L_eps failed");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nv, ny - 2);
    for (int i = 1; i + 1 < ny; ++i)
      for (int j = 1; j + 1 < nz; ++j) P((i - 1) * (nz - 2) + (j - 1), i - 1) = c->psi[j];
    c->sharp_basis = c->sharpL->solve(P);
    Eigen::MatrixXd S(ny - 2, ny - 2);
    for (int a = 0; a < ny - 2; ++a)
      for (int b = 0; b < ny - 2; ++b) {
        double acc = 0.0;
        for (int j = 1; j + 1 < nz; ++j) acc += c->ws[j] * c->psi[j] * c->sharp_basis(a * (nz - 2) + (j - 1), b);
        S(a, b) = acc;
      }
    c->schur.compute(S);
    if (!c->schur.isInvertible()) fail(ErrorKind::NumericFailure, "singular multiplier system");
  }
  {
    const double h = grid.hy();
    c->J = Eigen::MatrixXd::Zero(ny, ny);
    for (int i = 1; i + 1 < ny; ++i) {
      const double cr = 1.0 / metric.at(0, {grid.y(i) + 0.5 * h, 0.0}, 0.0).a;
      const double cl = 1.0 / metric.at(0, {grid.y(i) - 0.5 * h, 0.0}, 0.0).a;
      const double k = 1.0 / (c->a0[i] * h * h);
      c->J(i, i - 1) = -k * cl;
      c->J(i, i + 1) = -k * cr;
      c->J(i, i) = k * (cl + cr) - c->V[i];
    }
    const Eigen::MatrixXd Jii = c->J.block(1, 1, ny - 2, ny - 2);
    Eigen::VectorXd sq = c->a0.segment(1, ny - 2).cwiseSqrt();
    const Eigen::MatrixXd S = sq.asDiagonal() * Jii * sq.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    c->jacobi_gap = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(c->jacobi_gap > 1e-8)) fail(ErrorKind::Precondition, "the Jacobi operator has a Dirichlet kernel");
    c->Jlu.compute(Jii);
  }
  return c;
}

Functionals functionals(const BarrierContext& c, const BarrierState& st, SignConvention sign) {
  return evaluate(c, st, sign).f;
}

double project_column(const BarrierContext& c, const Eigen::VectorXd& col) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < c.nz(); ++j) {
    num += c.ws[j] * col[j] * c.psi[j];
    den += c.ws[j] * c.psi[j] * c.psi[j];
  }
  return num / den;
}

double projection_sup(const BarrierContext& c, const Eigen::VectorXd& v_sharp) {
  const Grid v = as_grid(c.grid, v_sharp);
  double out = 0.0;
  for (int i = 1; i + 1 < c.ny(); ++i) out = std::max(out, std::abs(project_column(c, v.row(i).transpose())));
  return out;
}

BoundaryData family_data(const BarrierContext& c, double mu) {
  const FieldGrid& g = c.grid;
  const double e2 = c.eps * c.eps, L = g.base.L[0];
  BoundaryData d;
  d.mu = mu;
  d.v_flat_hat = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) {
      if (!g.fixed(i, j)) continue;
      const double s = c.s[j];
      d.v_flat_hat[g.index(i, j)] =
          mu * e2 * (1.0 - c.chi_s[4][j]) * (0.5 + 0.5 * std::cos(M_PI * g.y(i) / L) * s);
    }
  d.v_sharp_hat.resize(g.nz, 2);
  for (int j = 0; j < g.nz; ++j) {
    const double v = mu * e2 * (c.s[j] / c.eps) * c.psi[j];
    d.v_sharp_hat(j, 0) = v;
    d.v_sharp_hat(j, 1) = -v;
  }
  d.zeta_hat = mu * std::pow(c.eps, 2.0 - 2.0 * c.alpha) * Eigen::Vector2d(0.5, -0.25);
  return d;
}

BoundaryData sliding_data(const BarrierContext& c, double B) {
  const FieldGrid& g = c.grid;
  const double eps = c.eps, le = eps * std::abs(std::log(eps));
  if (!(B > 0.0)) fail(ErrorKind::InvalidArgument, "B must be positive");
  const Cutoff hat{B * le, 2.0 * B * le};
  const double top = 1.0 - eps * eps * eps;
  auto target = [&](double s) { return s > 0.0 ? top : -1.0; };
  BoundaryData d;
  d.mu = 0.0;
  Eigen::VectorXd tail(g.nz), bump(g.nz);
  for (int j = 0; j < g.nz; ++j) {
    const double s = c.s[j];
    const double h = hat.eval(0, s);
    tail[j] = s == 0.0 ? 0.0 : (1.0 - h) * (target(s) - c.Ht[j]);
    bump[j] = h * c.psi[j];
  }
  const double gamma = -project_column(c, tail) / project_column(c, bump);
  d.v_sharp_hat.resize(g.nz, 2);
  for (int j = 0; j < g.nz; ++j) d.v_sharp_hat(j, 0) = d.v_sharp_hat(j, 1) = gamma * bump[j] + tail[j];
  d.v_flat_hat = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) {
      if (!g.fixed(i, j) || c.s[j] == 0.0) continue;
      d.v_flat_hat[g.index(i, j)] = (1.0 - c.chi_s[4][j]) * (target(c.s[j]) - c.Ht[j]);
    }
  return d;
}

void validate_data(const BarrierContext& c, const BoundaryData& d) {
  const FieldGrid& g = c.grid;
  if (d.v_flat_hat.size() != g.size() || d.v_sharp_hat.rows() != g.nz || d.v_sharp_hat.cols() != 2)
    fail(ErrorKind::InvalidArgument, "boundary data does not match the grid");
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j)
      if (g.fixed(i, j) && c.chi_s[4][j] == 1.0 && d.v_flat_hat[g.index(i, j)] != 0.0)
        fail(ErrorKind::InvalidArgument, "v_flat_hat must vanish where chi_4 = 1");
  for (int k = 0; k < 2; ++k)
    if (std::abs(project_column(c, d.v_sharp_hat.col(k))) > 1e-10)
      fail(ErrorKind::InvalidArgument, "v_sharp_hat must be orthogonal to H'");
  const double lim = 1.0 / (kStepSup[1] / c.chi[2].width());
  if (d.zeta_hat.cwiseAbs().maxCoeff() >= lim) fail(ErrorKind::InvalidArgument, "zeta_hat breaks injectivity of D_zeta");
}

double holder_norm(const FieldGrid& g, const Eigen::VectorXd& v, double eps, double alpha, int k) {
  if (k < 0 || k > 2) fail(ErrorKind::InvalidArgument, "holder order must be 0..2");
  const double hy = g.hy(), hs = g.hz();
  const Grid f = as_grid(g, v);
  double out = f.cwiseAbs().maxCoeff();
  std::vector<Grid> top{f};
  std::vector<double> wts{1.0};
  if (k >= 1) {
    const Grid fy = diff_y(f, hy, 1), fs = diff_s(f, hs, 1);
    out += eps * (fy.array().square() + fs.array().square()).sqrt().maxCoeff();
    top = {fy, fs};
    wts = {1.0, 1.0};
    if (k == 2) {
      const Grid fyy = diff_y(f, hy, 2), fss = diff_s(f, hs, 2), fys = diff_s(fy, hs, 1);
      out += eps * eps *
             (fyy.array().square() + 2.0 * fys.array().square() + fss.array().square()).sqrt().maxCoeff();
      top = {fyy, fys, fss};
      wts = {1.0, 2.0, 1.0};
    }
  }
  out += std::pow(eps, k + alpha) * holder_seminorm(top, wts, hy, hs, 3.0 * eps, alpha);
  return out;
}

double holder_norm_1d(const Eigen::VectorXd& v, double h, double eps, double alpha, double reach, int k) {
  if (k < 0 || k > 2) fail(ErrorKind::InvalidArgument, "holder order must be 0..2");
  const int n = static_cast<int>(v.size());
  double out = v.cwiseAbs().maxCoeff();
  Eigen::VectorXd top = v;
  if (k >= 1) {
    top = d1(v, h);
    out += eps * top.cwiseAbs().maxCoeff();
  }
  if (k == 2) {
    top = d2(v, h);
    out += eps * eps * top.cwiseAbs().maxCoeff();
  }
  const int m = reach <= 0.0 ? n : std::max(1, static_cast<int>(std::floor(reach / h + 1e-9)));
  double semi = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b <= std::min(n - 1, a + m); ++b)
      semi = std::max(semi, std::abs(top[a] - top[b]) / std::pow((b - a) * h, alpha));
  return out + std::pow(eps, k + alpha) * semi;
}

double modified_norm(const BarrierContext& c, const Eigen::VectorXd& v) {
  Eigen::VectorXd cv = v;
  for (int i = 0; i < c.ny(); ++i)
    for (int j = 0; j < c.nz(); ++j) cv[c.grid.index(i, j)] *= c.chi_s[5][j];
  return holder_norm(c.grid, cv, c.eps, c.alpha) / (c.eps * c.eps) + holder_norm(c.grid, v, c.eps, c.alpha);
}

namespace {

double zeta_norm(const BarrierContext& c, const Eigen::VectorXd& z) {
  return std::pow(c.eps, 2.0 * c.alpha) * holder_norm_1d(z, c.grid.hy(), 1.0, c.alpha, 0.0);
}

}  // namespace

double state_norm(const BarrierContext& c, const BarrierState& st) {
  return modified_norm(c, st.v_flat) + holder_norm(c.grid, st.v_sharp, c.eps, c.alpha) + zeta_norm(c, st.zeta);
}

double data_norm(const BarrierContext& c, const BoundaryData& d) {
  const FieldGrid& g = c.grid;
  const int ny = g.ny(), nz = g.nz;
  const double eps = c.eps, al = c.alpha, reach = 3.0 * eps;
  double flat = 0.0;
  for (int side : {0, nz - 1}) {  // s = -1 and s = 1 rows, where chi_5 = 0
    Eigen::VectorXd row(ny);
    for (int i = 0; i < ny; ++i) row[i] = d.v_flat_hat[g.index(i, side)];
    flat = std::max(flat, holder_norm_1d(row, g.hy(), eps, al, reach));
  }
  for (int end : {0, ny - 1}) {
    Eigen::VectorXd col(nz), cut(nz);
    for (int j = 0; j < nz; ++j) {
      col[j] = d.v_flat_hat[g.index(end, j)];
      cut[j] = c.chi_s[5][j] * col[j];
    }
    flat = std::max(flat, holder_norm_1d(cut, g.hz(), eps, al, reach) / (eps * eps) +
                              holder_norm_1d(col, g.hz(), eps, al, reach));
  }
  double sharp = 0.0;
  for (int k = 0; k < 2; ++k)
    sharp = std::max(sharp, holder_norm_1d(d.v_sharp_hat.col(k), g.hz(), eps, al, reach));
  return flat + sharp + d.zeta_hat.cwiseAbs().maxCoeff();
}

BarrierState difference(const BarrierState& a, const BarrierState& b) {
  return BarrierState{a.v_flat - b.v_flat, a.v_sharp - b.v_sharp, a.zeta - b.zeta};
}

BoundaryData difference(const BoundaryData& a, const BoundaryData& b) {
  BoundaryData d;
  d.v_flat_hat = a.v_flat_hat - b.v_flat_hat;
  d.v_sharp_hat = a.v_sharp_hat - b.v_sharp_hat;
  d.zeta_hat = a.zeta_hat - b.zeta_hat;
  d.mu = a.mu - b.mu;
  return d;
}

BarrierResult fixed_point_solve(BarrierContextPtr cp, const BoundaryData& d, double tol, int max_iter) {
  if (!cp) fail(ErrorKind::InvalidArgument, "null barrier context");
  const BarrierContext& c = *cp;
  validate_data(c, d);
  const FieldGrid& g = c.grid;
  const int ny = g.ny(), nz = g.nz, n = g.size();
  const double e2 = c.eps * c.eps;

  BarrierState st;
  st.v_flat = Eigen::VectorXd::Zero(n);
  st.v_sharp = Eigen::VectorXd::Zero(n);
  st.zeta = Eigen::VectorXd::Zero(ny);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j)
      if (g.fixed(i, j)) st.v_flat[g.index(i, j)] = d.v_flat_hat[g.index(i, j)];
  for (int j = 1; j + 1 < nz; ++j) {
    st.v_sharp[g.index(0, j)] = d.v_sharp_hat(j, 0);
    st.v_sharp[g.index(ny - 1, j)] = d.v_sharp_hat(j, 1);
  }
  st.zeta[0] = d.zeta_hat[0];
  st.zeta[ny - 1] = d.zeta_hat[1];

  // boundary couplings are fixed across iterations
  const Eigen::VectorXd flat_lift = e2 * (c.lap0 * st.v_flat);
  const Eigen::VectorXd sharp_lift = e2 * (c.lapP * st.v_sharp);
  const Eigen::VectorXd zeta_lift = c.J * st.zeta;

  BarrierResult res;
  double prev = 0.0;
  int bad = 0;
  double scale = 1.0;  // size of the first sweep, which fills the interior from zero
  double log_sum = 0.0;
  int log_count = 0;
  for (int k = 1; k <= max_iter; ++k) {
    const Evaluation ev = evaluate(c, st, SignConvention::consistent);
    BarrierState nx = st;

    Eigen::VectorXd rhs(c.interior.size());
    for (size_t r = 0; r < c.interior.size(); ++r) {
      const int p = c.interior[r];
      rhs[r] = ev.f.N[p] - flat_lift[p];
    }
    const Eigen::VectorXd vf = c.calL->solve(rhs);
    if (c.calL->info() != Eigen::Success) fail(ErrorKind::NumericFailure, "far-field solve failed");
    for (size_t r = 0; r < c.interior.size(); ++r) nx.v_flat[c.interior[r]] = vf[r];

    Eigen::VectorXd b(c.sharp_unknowns);
    for (int p = 0; p < n; ++p)
      if (c.sharp_slot[p] >= 0) b[c.sharp_slot[p]] = ev.f.M[p] - sharp_lift[p];
    const Eigen::VectorXd y0 = c.sharpL->solve(b);
    Eigen::VectorXd py(ny - 2);
    for (int i = 1; i + 1 < ny; ++i) {
      double acc = 0.0;
      for (int j = 1; j + 1 < nz; ++j) acc += c.ws[j] * c.psi[j] * y0[(i - 1) * (nz - 2) + (j - 1)];
      py[i - 1] = acc;
    }
    const Eigen::VectorXd mult = c.schur.solve(py);
    const Eigen::VectorXd x = y0 - c.sharp_basis * mult;
    for (int p = 0; p < n; ++p)
      if (c.sharp_slot[p] >= 0) nx.v_sharp[p] = x[c.sharp_slot[p]];

    Eigen::VectorXd zr(ny - 2);
    for (int i = 1; i + 1 < ny; ++i) zr[i - 1] = mult[i - 1] / c.eps - zeta_lift[i];
    nx.zeta.segment(1, ny - 2) = c.Jlu.solve(zr);

    IterationRecord rec;
    rec.k = k;
    rec.residual = ev.T.cwiseAbs().maxCoeff();
    const BarrierState dif = difference(nx, st);
    rec.flat_norm = modified_norm(c, dif.v_flat);
    rec.sharp_norm = holder_norm(g, dif.v_sharp, c.eps, c.alpha);
    rec.zeta_norm = zeta_norm(c, dif.zeta);
    rec.update = rec.flat_norm + rec.sharp_norm + rec.zeta_norm;
    rec.factor = k > 1 && prev > 0.0 ? rec.update / prev : 0.0;
    st = nx;
    res.trace.push_back(rec);
    if (k > 1) {
      // the ratio against the first sweep, which fills the interior from zero, is not a rate
      if (k > 2) {
        res.contraction_max = std::max(res.contraction_max, rec.factor);
        if (rec.factor > 0.0) {
          log_sum += std::log(rec.factor);
          ++log_count;
        }
      }
      // factors measured near the round-off floor carry no information
      bad = (rec.factor >= 1.0 && rec.update > 100.0 * tol * scale) ? bad + 1 : 0;
    } else {
      scale = std::max(1.0, rec.update);
    }
    prev = rec.update;
    res.iterations = k;
    if (rec.update < tol * scale) {
      res.converged = true;
      break;
    }
    if (bad >= 3) fail(ErrorKind::NoContraction, "update grew over 3 consecutive iterations");
  }
  res.contraction = log_count > 0 ? std::exp(log_sum / log_count) : 0.0;

  const Evaluation fin = evaluate(c, st, SignConvention::consistent);
  res.residual = fin.T.cwiseAbs().maxCoeff();
  res.state = st;
  res.projection = projection_sup(c, st.v_sharp);

  double mism = std::max(std::abs(st.zeta[0] - d.zeta_hat[0]), std::abs(st.zeta[ny - 1] - d.zeta_hat[1]));
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      if (!g.fixed(i, j)) continue;
      const int p = g.index(i, j);
      mism = std::max(mism, std::abs(st.v_flat[p] - d.v_flat_hat[p]));
      if (i == 0 || i == ny - 1) {
        const double want = (j == 0 || j == nz - 1) ? 0.0 : d.v_sharp_hat(j, i == 0 ? 0 : 1);
        mism = std::max(mism, std::abs(st.v_sharp[p] - want));
      }
    }
  res.boundary_mismatch = mism;

  res.F.resize(n);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      const int p = g.index(i, j);
      res.F[p] = c.Ht[j] + c.chi_s[4][j] * st.v_sharp[p] + st.v_flat[p];
      if (std::abs(res.F[p]) <= 0.9) res.strip_constant = std::max(res.strip_constant, std::abs(c.s[j]) / c.eps);
    }

  Eigen::VectorXd u(n);
  const double hs = g.hz();
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      const double sj = offset_forward(c.chi[2], st.zeta[i], c.s[j]);
      u[g.index(i, j)] = interp_column(res.F.data() + g.index(i, 0), nz, -1.0, hs, sj);
    }
  res.u = make_field(make_setup(g, c.metric, c.well), c.eps, u);
  res.original_residual = residual_sup(res.u);
  res.flat_norm = modified_norm(c, st.v_flat);
  res.sharp_norm = holder_norm(g, st.v_sharp, c.eps, c.alpha);
  res.zeta_norm = zeta_norm(c, st.zeta);
  return res;
}

ContactReport ordering(const PhaseField& b, const PhaseField& u) {
  const FieldGrid& g = b.grid();
  if (u.u.size() != b.u.size() || u.grid().ny() != g.ny() || u.grid().nz != g.nz)
    fail(ErrorKind::InvalidArgument, "comparison needs both fields on one grid");
  ContactReport r;
  r.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j) {
      const int p = g.index(i, j);
      const double gap = u.u[p] - b.u[p];
      if (gap < r.min_gap) {
        r.min_gap = gap;
        r.argmin = p;
        r.argmin_on_boundary = g.fixed(i, j);
      }
      if (gap <= 0.0) r.contact.push_back(p);
    }
  r.ordered = r.min_gap > 0.0;
  return r;
}

ContactReport comparison_check(const PhaseField& b, const PhaseField& u) {
  const ContactReport r = ordering(b, u);
  const FieldGrid& g = b.grid();
  for (int i = 0; i < g.ny(); ++i)
    for (int j = 0; j < g.nz; ++j)
      if (g.fixed(i, j) && !(u.u[g.index(i, j)] > b.u[g.index(i, j)]))
        fail(ErrorKind::Precondition, "barrier is not strictly below the solution on the boundary");
  return r;
}

double decay_constant(const PhaseField& u) {
  const double eps = u.eps, le = eps * std::abs(std::log(eps));
  const LayerStack stack = nodal_layers(u);
  const FieldSetup& s = *u.setup;
  std::vector<Eigen::VectorXd> dist;
  for (const auto& f : stack.f) dist.push_back(signed_distance(s, f));
  const double cut = 1.0 - eps * eps * eps;
  double B = 0.0;
  for (int p = 0; p < u.u.size(); ++p) {
    if (std::abs(u.u[p]) > cut) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& v : dist) d = std::min(d, std::abs(v[p]));
    B = std::max(B, d / (3.0 * le));
  }
  return B;
}

PhaseField pull_back(const PhaseField& u, SetupPtr target, double shift) {
  const FieldGrid& gs = u.grid();
  const FieldGrid& gt = target->grid;
  if (gs.ny() != gt.ny() || std::abs(gs.base.L[0] - gt.base.L[0]) > 1e-14 || gs.base.periodic != gt.base.periodic)
    fail(ErrorKind::InvalidArgument, "pull-back needs a common base grid");
  if (gt.z_lo + shift < gs.z_lo - 1e-12 || gt.z_hi + shift > gs.z_hi + 1e-12)
    fail(ErrorKind::OutOfChart, "shifted slab leaves the solution domain");
  Eigen::VectorXd v(gt.size());
  for (int i = 0; i < gt.ny(); ++i) {
    const double* col = u.u.data() + gs.index(i, 0);
    for (int j = 0; j < gt.nz; ++j) v[gt.index(i, j)] = interp_column(col, gs.nz, gs.z_lo, gs.hz(), gt.z(j) + shift);
  }
  PhaseField out;
  out.setup = target;
  out.eps = u.eps;
  out.u = v;
  return out;
}

SlidingReport sliding(const BarrierResult& barrier, const PhaseField& u, double leaf, double delta, double B,
                      double B_measured, int scan) {
  if (!(delta > 0.0) || scan < 2) fail(ErrorKind::InvalidArgument, "sliding needs delta > 0 and scan >= 2");
  const PhaseField& b = barrier.u;
  const double eps = b.eps;
  SlidingReport r;
  r.B = B;
  r.B_measured = B_measured;
  r.leaf = leaf;
  r.delta = delta;
  r.bound = 7.0 * B * eps * std::abs(std::log(eps));
  auto at = [&](double t) { return ordering(b, pull_back(u, b.setup, leaf + t)); };
  const ContactReport start = at(delta);
  r.start_ordered = start.ordered;
  if (!start.ordered) {
    r.t_star = delta;
    r.contact = start;
    return r;
  }
  double hi = delta, lo = -delta;
  bool found = false;
  for (int k = 1; k <= scan; ++k) {
    const double t = delta - 2.0 * delta * k / scan;
    if (!at(t).ordered) {
      lo = t;
      found = true;
      break;
    }
    hi = t;
  }
  if (!found) {
    r.t_star = -delta;
    r.contact = at(-delta);
    return r;
  }
  while (hi - lo > 1e-10 * std::max(1.0, delta)) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid).ordered) hi = mid;
    else lo = mid;
    ++r.bisections;
  }
  r.t_star = hi;
  r.contact = at(lo);
  r.within = r.t_star >= 0.0 && r.t_star <= r.bound;
  return r;
}

}  // namespace aclab
