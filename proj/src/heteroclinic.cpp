#include "aclab/heteroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "aclab/error.hpp"

namespace aclab {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

double hermite(double y0, double y1, double m0, double m1, double h, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * m1;
}

double tail_moment(double A0, double T) {
  // integral over [T, inf) of tau * 2 A0^2 e^{-2 sqrt2 tau}
  return 2.0 * A0 * A0 * std::exp(-2.0 * kSqrt2 * T) * (T / (2.0 * kSqrt2) + 0.125);
}

}  // namespace

double d6(const Eigen::VectorXd& y, int i, double h) {
  return (-y[i - 3] + 9.0 * y[i - 2] - 45.0 * y[i - 1] + 45.0 * y[i + 1] - 9.0 * y[i + 2] + y[i + 3]) /
         (60.0 * h);
}

double Profile::eval(int k, double tq) const {
  if (k < 0 || k > 2) fail(ErrorKind::InvalidArgument, "profile derivative order must be 0..2");
  if (tq > t_max || tq < -t_max) {
    const bool right = tq > 0;
    const double e = (right ? A0 : A0_minus) * std::exp(-kSqrt2 * std::abs(tq));
    if (k == 0) return right ? 1.0 - e : -1.0 + e;
    if (k == 1) return kSqrt2 * e;
    return right ? -2.0 * e : 2.0 * e;
  }
  int i = static_cast<int>(std::floor((tq + t_max) / dt));
  i = std::clamp(i, 0, n - 1);
  const double s = (tq - t[i]) / dt;
  const DoubleWell& w = *well;
  switch (k) {
    case 0: return hermite(H[i], H[i + 1], dH[i], dH[i + 1], dt, s);
    case 1: return hermite(dH[i], dH[i + 1], d2H[i], d2H[i + 1], dt, s);
    default:
      return hermite(d2H[i], d2H[i + 1], w.eval(2, H[i]) * dH[i], w.eval(2, H[i + 1]) * dH[i + 1], dt, s);
  }
}

TailFit fit_tail(const Profile& p, double t_lo, double t_hi, int side) {
  if (!(t_lo < t_hi) || t_hi > p.t_max) fail(ErrorKind::InvalidArgument, "bad tail fit window");
  std::vector<int> idx;
  for (int i = 0; i <= p.n; ++i) {
    const double a = side * p.t[i];
    if (a >= t_lo && a <= t_hi) idx.push_back(i);
  }
  const int m = static_cast<int>(idx.size());
  if (m < 4) fail(ErrorKind::InvalidArgument, "tail fit window contains too few nodes");
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd b(m);
  for (int r = 0; r < m; ++r) {
    const int i = idx[r];
    const double a = std::abs(p.t[i]);
    const double gap = side > 0 ? 1.0 - p.H[i] : 1.0 + p.H[i];
    if (!(gap > 0.0)) fail(ErrorKind::NumericFailure, "profile reached the well inside the fit window");
    const double e = std::exp(-kSqrt2 * a);
    A(r, 0) = 1.0;
    A(r, 1) = e;
    A(r, 2) = e * e;
    b[r] = std::log(gap) + kSqrt2 * a;
  }
  const Eigen::Vector3d scale = A.colwise().maxCoeff().transpose();
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  const Eigen::Vector3d cs = As.colPivHouseholderQr().solve(b);
  const Eigen::Vector3d c = cs.cwiseQuotient(scale);
  TailFit f;
  f.A0 = std::exp(c[0]);
  f.correction = c[1];
  f.residual = std::sqrt((A * c - b).squaredNorm() / m);
  return f;
}

Profile solve_profile(WellPtr well, double t_max, int n) {
  if (!well) fail(ErrorKind::InvalidArgument, "null well");
  if (!(t_max >= 10.0)) fail(ErrorKind::InvalidArgument, "t_max must be >= 10");
  if (n < 2048 || n % 2 != 0) fail(ErrorKind::InvalidArgument, "n must be even and >= 2048");
  Profile p;
  p.well = well;
  p.t_max = t_max;
  p.n = n;
  p.dt = 2.0 * t_max / n;
  p.t = Eigen::VectorXd::LinSpaced(n + 1, -t_max, t_max);
  p.t[n / 2] = 0.0;
  p.H.setZero(n + 1);
  p.dH.setZero(n + 1);
  p.d2H.setZero(n + 1);

  const DoubleWell& w = *well;
  auto f = [&](double h) { return std::sqrt(std::max(0.0, 2.0 * w.eval(0, h))); };
  constexpr int sub = 8;
  const int c = n / 2;
  for (int dir : {1, -1}) {
    const double h = dir * p.dt / sub;
    double y = 0.0;
    for (int k = 1; k <= c; ++k) {
      for (int s = 0; s < sub; ++s) {
        const double k1 = f(y);
        const double k2 = f(y + 0.5 * h * k1);
        const double k3 = f(y + 0.5 * h * k2);
        const double k4 = f(y + h * k3);
        y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      }
      p.H[c + dir * k] = y;
    }
  }
  for (int i = 0; i <= n; ++i) {
    p.dH[i] = f(p.H[i]);
    p.d2H[i] = w.eval(1, p.H[i]);
  }
  // far tails may round to +-1 exactly when t_max is large
  for (int i = 0; i < n; ++i) {
    const bool saturated = std::abs(p.H[i]) >= 1.0 - 1e-12 && std::abs(p.H[i + 1]) >= 1.0 - 1e-12;
    if (p.H[i + 1] < p.H[i] || (!saturated && !(p.H[i + 1] > p.H[i])))
      fail(ErrorKind::NumericFailure, "profile is not strictly increasing");
  }

  for (int i = 3; i <= n - 3; ++i) {
    const double dh = d6(p.H, i, p.dt);
    p.ode_residual = std::max(p.ode_residual, std::abs(d6(p.dH, i, p.dt) - p.d2H[i]));
    p.ode_residual = std::max(p.ode_residual, std::abs(dh - p.dH[i]));
    p.first_integral_defect = std::max(p.first_integral_defect, std::abs(dh * dh - 2.0 * w.eval(0, p.H[i])));
  }
  if (p.first_integral_defect > 1e-10 || p.ode_residual > 1e-9) {
    std::ostringstream os;
    os << "profile check failed: first integral defect " << p.first_integral_defect << ", ode residual "
       << p.ode_residual;
    fail(ErrorKind::NumericFailure, os.str());
  }

  p.h0 = h0_quadrature(w, 1e-13);
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += (i == 0 || i == n ? 0.5 : 1.0) * p.dH[i] * p.dH[i];
  p.h0_profile = s * p.dt;
  p.A0 = fit_tail(p, 4.0, 8.0, +1).A0;
  p.A0_minus = fit_tail(p, 4.0, 8.0, -1).A0;
  return p;
}

double tail_expansion_constant(const Profile& p, double t_lo, double t_hi) {
  double C = 0.0;
  for (int i = 0; i <= p.n; ++i) {
    const double a = std::abs(p.t[i]);
    if (a < t_lo || a > t_hi) continue;
    const double sgn = p.t[i] > 0 ? 1.0 : -1.0;
    const double A = sgn > 0 ? p.A0 : p.A0_minus;
    const double model = sgn * (1.0 - A * std::exp(-kSqrt2 * a));
    C = std::max(C, std::abs(p.H[i] - model) * std::exp(2.0 * kSqrt2 * a));
  }
  return C;
}

double cutoff_chi(int k, double s) {
  const double x = std::abs(s) - 1.0;
  if (k == 0) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
  }
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double d;
  switch (k) {
    case 1: d = 30.0 * x * x * (1.0 - x) * (1.0 - x); break;
    case 2: d = 60.0 * x - 180.0 * x * x + 120.0 * x * x * x; break;
    case 3: d = 60.0 - 360.0 * x + 360.0 * x * x; break;
    case 4: d = -360.0 + 720.0 * x; break;
    default: fail(ErrorKind::InvalidArgument, "cutoff derivative order must be 0..4");
  }
  const double sg = (s < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
  return -sg * d;
}

TruncatedProfile::TruncatedProfile(std::shared_ptr<const Profile> base, double Lambda)
    : base_(std::move(base)), Lambda_(Lambda) {
  if (!base_) fail(ErrorKind::InvalidArgument, "null profile");
  if (!(Lambda >= 4.0)) fail(ErrorKind::InvalidArgument, "Lambda must be >= 4");
  if (Lambda > 0.5 * base_->t_max) fail(ErrorKind::InvalidArgument, "Lambda exceeds t_max / 2");
  const double span = 2.5 * Lambda;
  const int m = static_cast<int>(std::ceil(2.0 * span / base_->dt));
  defect_table_.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double t = -span + 2.0 * span * i / m;
    const double d0 = defect(0, t);
    defect_table_[i] = d0;
    defect_sup_ = std::max(defect_sup_, std::abs(d0) + std::abs(defect(1, t)) + std::abs(defect(2, t)));
  }
}

void TruncatedProfile::profile_derivs(double t, double* g) const {
  const DoubleWell& w = *base_->well;
  g[0] = base_->eval(0, t);
  g[1] = std::sqrt(std::max(0.0, 2.0 * w.eval(0, g[0])));
  g[2] = w.eval(1, g[0]);
  g[3] = w.eval(2, g[0]) * g[1];
  g[4] = w.eval(3, g[0]) * g[1] * g[1] + w.eval(2, g[0]) * g[2];
}

double TruncatedProfile::eval(int k, double t) const {
  if (k < 0 || k > 4) fail(ErrorKind::InvalidArgument, "truncated derivative order must be 0..4");
  const double s = t / Lambda_;
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  if (std::abs(s) >= 2.0) return k == 0 ? sgn : 0.0;
  double g[5];
  profile_derivs(t, g);
  if (std::abs(s) <= 1.0) return g[k];
  g[0] -= sgn;
  static constexpr double binom[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  double out = k == 0 ? sgn : 0.0;
  double lp = 1.0;
  for (int j = 0; j <= k; ++j) {
    out += binom[k][j] * cutoff_chi(j, s) * lp * g[k - j];
    lp /= Lambda_;
  }
  return out;
}

double TruncatedProfile::defect(int k, double t) const {
  const DoubleWell& w = *base_->well;
  const double b0 = eval(0, t);
  switch (k) {
    case 0: return eval(2, t) - w.eval(1, b0);
    case 1: return eval(3, t) - w.eval(2, b0) * eval(1, t);
    case 2: {
      const double b1 = eval(1, t);
      return eval(4, t) - w.eval(3, b0) * b1 * b1 - w.eval(2, b0) * eval(2, t);
    }
    default: fail(ErrorKind::InvalidArgument, "defect derivative order must be 0..2");
  }
}

JTable solve_j(const Profile& p) {
  // the corrector divides by H'^2, so stay on the window where H' is resolved
  const double t_j = std::min(p.t_max, 16.0);
  const int half = static_cast<int>(std::lround(t_j / p.dt));
  const int off = p.n / 2 - half;
  const int n = 2 * half, c = half;
  const double h = p.dt;
  const DoubleWell& w = *p.well;
  const Eigen::VectorXd tt = p.t.segment(off, n + 1);
  const Eigen::VectorXd H = p.H.segment(off, n + 1);
  const Eigen::VectorXd dH = p.dH.segment(off, n + 1);
  const Eigen::VectorXd d2H = p.d2H.segment(off, n + 1);
  const double tend = tt[n];
  Eigen::VectorXd f(n + 1), fp(n + 1), F(n + 1), G(n + 1), Gp(n + 1), Phi(n + 1);
  for (int i = 0; i <= n; ++i) {
    f[i] = tt[i] * dH[i] * dH[i];
    fp[i] = dH[i] * dH[i] + 2.0 * tt[i] * dH[i] * d2H[i];
  }
  auto seg = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& yp, int i) {
    return 0.5 * h * (y[i] + y[i + 1]) - h * h / 12.0 * (yp[i + 1] - yp[i]);
  };
  // F(s) = integral of tau H'^2 over (-inf, s]; evaluated from the nearer infinity.
  F[n] = -tail_moment(p.A0, tend);
  for (int i = n - 1; i >= c; --i) F[i] = F[i + 1] - seg(f, fp, i);
  const double Fc_right = F[c];
  F[0] = -tail_moment(p.A0_minus, tend);
  for (int i = 0; i < c; ++i) F[i + 1] = F[i] + seg(f, fp, i);
  F[c] = 0.5 * (F[c] + Fc_right);

  for (int i = 0; i <= n; ++i) {
    const double d = dH[i];
    G[i] = F[i] / (d * d);
    Gp[i] = tt[i] - 2.0 * F[i] * d2H[i] / (d * d * d);
  }
  Phi[c] = 0.0;
  for (int i = c + 1; i <= n; ++i) Phi[i] = Phi[i - 1] + seg(G, Gp, i - 1);
  for (int i = c - 1; i >= 0; --i) Phi[i] = Phi[i + 1] - seg(G, Gp, i);

  JTable j;
  j.t = tt;
  j.dt = h;
  j.J = dH.cwiseProduct(Phi);
  j.dJ.resize(n + 1);
  for (int i = 0; i <= n; ++i) j.dJ[i] = d2H[i] * Phi[i] + F[i] / dH[i];
  for (int i = 3; i <= n - 3; ++i) {
    const double rhs = w.eval(2, H[i]) * j.J[i] + tt[i] * dH[i];
    j.ode_residual = std::max(j.ode_residual, std::abs(d6(j.dJ, i, h) - rhs));
    j.ode_residual = std::max(j.ode_residual, std::abs(d6(j.J, i, h) - j.dJ[i]));
  }
  for (int i = 0; i <= n; ++i) j.parity_defect = std::max(j.parity_defect, std::abs(j.J[i] + j.J[n - i]));
  double s = 0.0;
  for (int i = 0; i <= n; ++i)
    s += (i == 0 || i == n ? 0.5 : 1.0) * w.eval(3, H[i]) * j.J[i] * dH[i] * dH[i];
  j.w3_identity = s * h;
  if (!std::isfinite(j.ode_residual) || j.ode_residual > 1e-6) {
    std::ostringstream os;
    os << "corrector ode residual " << j.ode_residual;
    fail(ErrorKind::NumericFailure, os.str());
  }
  return j;
}

Interaction interaction_integral(const Profile& p, double T, const std::function<double(double)>& w2) {
  if (!(T >= 0.0)) fail(ErrorKind::InvalidArgument, "T must be >= 0");
  double full = 0.0, coarse = 0.0;
  for (int i = 0; i <= p.n; ++i) {
    const double wt = (i == 0 || i == p.n) ? 0.5 : 1.0;
    const double v = wt * (w2(p.H[i]) - 2.0) * p.eval(1, p.t[i] - T) * p.dH[i];
    full += v;
    if (i % 2 == 0) coarse += v;
  }
  Interaction r;
  r.value = full * p.dt;
  r.error = std::abs(r.value - coarse * 2.0 * p.dt);
  r.asymptote = -4.0 * kSqrt2 * p.A0 * p.A0 * std::exp(-kSqrt2 * T);
  return r;
}

Interaction interaction_integral(const Profile& p, double T) {
  const DoubleWell& w = *p.well;
  return interaction_integral(p, T, [&](double x) { return w.eval(2, x); });
}

void write_profile_csv(const std::string& path, const Profile& p, const JTable* j) {
  FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorKind::ConfigError, "cannot write " + path);
  std::fprintf(fp, "t,H,dH,d2H,J\n");
  const int off = j ? (p.n - static_cast<int>(j->J.size() - 1)) / 2 : 0;
  for (int i = 0; i <= p.n; ++i) {
    const int k = i - off;
    const double J = (j && k >= 0 && k < j->J.size()) ? j->J[k] : 0.0;
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t[i], p.H[i], p.dH[i], p.d2H[i], J);
  }
  std::fclose(fp);
}

}  // namespace aclab
