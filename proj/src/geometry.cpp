#include "aclab/geometry.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "aclab/error.hpp"

namespace aclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Eigen::Vector2d BaseGrid::node(int j) const {
  if (dim == 1) return {j * h(0), 0.0};
  return {(j / n[1]) * h(0), (j % n[1]) * h(1)};
}

double BaseGrid::weight(int j) const {
  double w = h(0);
  if (dim == 2) w *= h(1);
  if (!periodic && dim == 1 && (j == 0 || j == n[0] - 1)) w *= 0.5;
  return w;
}

bool BaseGrid::on_boundary(int j) const { return !periodic && dim == 1 && (j == 0 || j == n[0] - 1); }

BaseGrid periodic_line(int n, double L) {
  if (n < 5 || n % 2 == 0) fail(ErrorKind::InvalidArgument, "periodic base needs an odd n >= 5");
  BaseGrid b;
  b.n[0] = n;
  b.L[0] = L;
  return b;
}

BaseGrid interval(int n, double L) {
  if (n < 5) fail(ErrorKind::InvalidArgument, "interval base needs n >= 5");
  BaseGrid b;
  b.n[0] = n;
  b.L[0] = L;
  b.periodic = false;
  return b;
}

BaseGrid periodic_torus(int n0, int n1, double L0, double L1) {
  if (n0 < 5 || n1 < 5 || n0 % 2 == 0 || n1 % 2 == 0)
    fail(ErrorKind::InvalidArgument, "torus needs odd sizes >= 5");
  BaseGrid b;
  b.dim = 2;
  b.n[0] = n0;
  b.n[1] = n1;
  b.L[0] = L0;
  b.L[1] = L1;
  return b;
}

double WarpedMetric::H(const Eigen::Vector2d& y, double z) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const WarpSample w = warp(i, y, z);
    s += w.az / w.a;
  }
  return s;
}

double WarpedMetric::sff_norm2(const Eigen::Vector2d& y, double z) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const WarpSample w = warp(i, y, z);
    s += (w.az / w.a) * (w.az / w.a);
  }
  return s;
}

double WarpedMetric::ric_zz(const Eigen::Vector2d& y, double z) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const WarpSample w = warp(i, y, z);
    s -= w.azz / w.a;
  }
  return s;
}

double WarpedMetric::volume_factor(const Eigen::Vector2d& y, double z) const {
  double p = 1.0;
  for (int i = 0; i < dim; ++i) p *= warp(i, y, z).a;
  return p;
}

WarpedMetric flat_metric(int dim) {
  WarpedMetric m;
  m.id = "flat";
  m.dim = dim;
  m.is_flat = m.is_product = true;
  m.warp = [](int, const Eigen::Vector2d&, double) { return WarpSample{}; };
  return m;
}

WarpedMetric circle_metric(double R, double L) {
  if (!(R > 0.0)) fail(ErrorKind::InvalidArgument, "circle radius must be positive");
  WarpedMetric m;
  std::ostringstream os;
  os << "circle:" << R;
  m.id = os.str();
  m.dim = 1;
  m.z_lo = -R;
  const double s = 2.0 * kPi / L;
  m.warp = [R, s](int, const Eigen::Vector2d&, double z) { return WarpSample{(R + z) * s, s, 0.0, 0.0}; };
  return m;
}

WarpedMetric synthetic_metric(std::function<double(const Eigen::Vector2d&)> V,
                              std::function<double(const Eigen::Vector2d&)> Vy, int dim, const std::string& id) {
  WarpedMetric m;
  m.id = id;
  m.dim = dim;
  m.z_lo = -10.0;
  m.z_hi = 10.0;
  m.warp = [V, Vy, dim](int i, const Eigen::Vector2d& y, double z) {
    const double v = V(y) / dim;
    const double a = std::exp(-0.5 * v * z * z);
    WarpSample w;
    w.a = a;
    w.az = -v * z * a;
    w.azz = (v * v * z * z - v) * a;
    w.ay = i == 0 ? -0.5 * z * z * Vy(y) / dim * a : 0.0;
    return w;
  };
  return m;
}

WarpedMetric metric_from_id(const std::string& id, const BaseGrid& base) {
  auto num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "bad number in metric id '" + id + "'");
    }
  };
  if (id == "flat") return flat_metric(base.dim);
  if (id.rfind("circle:", 0) == 0) {
    if (base.dim != 1) fail(ErrorKind::ConfigError, "circle metric needs a 1-d base");
    return circle_metric(num(id.substr(7)), base.L[0]);
  }
  if (id.rfind("synthetic:", 0) == 0) {
    const double V = num(id.substr(10));
    return synthetic_metric([V](const Eigen::Vector2d&) { return V; }, [](const Eigen::Vector2d&) { return 0.0; },
                            base.dim, id);
  }
  if (id.rfind("synthetic-cos:", 0) == 0) {
    const std::string rest = id.substr(14);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) fail(ErrorKind::ConfigError, "synthetic-cos needs c0,c1");
    const double c0 = num(rest.substr(0, comma)), c1 = num(rest.substr(comma + 1));
    const double k = 2.0 * kPi / base.L[0];
    return synthetic_metric([c0, c1, k](const Eigen::Vector2d& y) { return c0 + c1 * std::cos(k * y[0]); },
                            [c1, k](const Eigen::Vector2d& y) { return -c1 * k * std::sin(k * y[0]); }, base.dim,
                            id);
  }
  fail(ErrorKind::ConfigError, "unknown metric id '" + id + "'");
}

LeafGeometry leaf_geometry(const WarpedMetric& m, const Eigen::Vector2d& y, double z) {
  LeafGeometry g;
  for (int i = 0; i < m.dim; ++i) {
    const WarpSample w = m.at(i, y, z);
    g.g[i] = w.a * w.a;
    g.A[i] = w.a * w.az;
    g.H += w.az / w.a;
    g.sff2 += (w.az / w.a) * (w.az / w.a);
    g.ric -= w.azz / w.a;
  }
  return g;
}

LeafGeometry evolve_geometry(const WarpedMetric& m, const Eigen::Vector2d& y, double z, double tol) {
  if (!std::isfinite(z)) fail(ErrorKind::InvalidArgument, "z must be finite");
  const int d = m.dim;
  // state: g_0, A_0, g_1, A_1, H
  using State = Eigen::Matrix<double, 5, 1>;
  auto rhs = [&](double s, const State& x) {
    State r = State::Zero();
    double sff2 = 0.0, ric = 0.0;
    for (int i = 0; i < d; ++i) {
      const WarpSample w = m.at(i, y, s);
      const double R = -w.a * w.azz;
      const double g = x[2 * i], A = x[2 * i + 1];
      r[2 * i] = 2.0 * A;
      r[2 * i + 1] = A * A / g - R;
      sff2 += (A / g) * (A / g);
      ric += R / g;
    }
    r[4] = -sff2 - ric;
    return r;
  };
  auto rk4 = [&](double s, const State& x, double h) {
    const State k1 = rhs(s, x);
    const State k2 = rhs(s + 0.5 * h, x + 0.5 * h * k1);
    const State k3 = rhs(s + 0.5 * h, x + 0.5 * h * k2);
    const State k4 = rhs(s + h, x + h * k3);
    return State(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  const LeafGeometry g0 = leaf_geometry(m, y, 0.0);
  State x;
  x << g0.g[0], g0.A[0], g0.g[1], g0.A[1], g0.H;
  double s = 0.0;
  double h = std::copysign(std::min(0.05, std::abs(z) + 1e-300), z);
  int steps = 0;
  auto degenerate = [&](const State& v) {
    for (int i = 0; i < d; ++i)
      if (!(v[2 * i] > 1e-12)) return true;
    return false;
  };
  while (std::abs(z - s) > 1e-15 && z != 0.0) {
    if (std::abs(h) > std::abs(z - s)) h = z - s;
    const State full = rk4(s, x, h);
    const State half = rk4(s + 0.5 * h, rk4(s, x, 0.5 * h), 0.5 * h);
    if (degenerate(half) || !half.allFinite()) {
      if (std::abs(h) < 1e-10) {
        std::ostringstream os;
        os << "focal point near z = " << s;
        fail(ErrorKind::GeometryDegenerate, os.str());
      }
      h *= 0.5;
      continue;
    }
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    const double scale = 1.0 + half.cwiseAbs().maxCoeff();
    if (err <= tol * scale) {
      s += h;
      x = half + (half - full) / 15.0;
      if (degenerate(x)) {
        std::ostringstream os;
        os << "focal point near z = " << s;
        fail(ErrorKind::GeometryDegenerate, os.str());
      }
    }
    const double fac = err > 0.0 ? 0.9 * std::pow(tol * scale / err, 0.2) : 2.0;
    h *= std::clamp(fac, 0.2, 2.0);
    if (++steps > 1000000) fail(ErrorKind::NumericFailure, "riccati integration did not finish");
  }
  LeafGeometry out;
  for (int i = 0; i < d; ++i) {
    out.g[i] = x[2 * i];
    out.A[i] = x[2 * i + 1];
    out.sff2 += (out.A[i] / out.g[i]) * (out.A[i] / out.g[i]);
  }
  out.H = x[4];
  const LeafGeometry cf = leaf_geometry(m, y, z);
  out.ric = cf.ric;
  return out;
}

Eigen::MatrixXd fourier_diff_matrix(int n, double L) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) {
        const int d = j - k;
        const double sgn = (d % 2) ? -1.0 : 1.0;
        // odd n avoids the Nyquist mode, which would add spurious kernel to D^2
        D(j, k) = 0.5 * sgn / (n % 2 ? std::sin(0.5 * d * h) : std::tan(0.5 * d * h));
      }
  return D * (2.0 * kPi / L);
}

Eigen::VectorXd base_diff(const BaseGrid& b, const Eigen::VectorXd& f, int axis) {
  Eigen::VectorXd out(f.size());
  if (b.periodic) {
    const Eigen::MatrixXd D = fourier_diff_matrix(b.n[axis], b.L[axis]);
    if (b.dim == 1) return D * f;
    const int n0 = b.n[0], n1 = b.n[1];
    Eigen::Map<const Eigen::MatrixXd> F(f.data(), n1, n0);  // column j0 holds the line y0 = j0
    Eigen::Map<Eigen::MatrixXd> O(out.data(), n1, n0);
    if (axis == 0)
      O = F * D.transpose();
    else
      O = D * F;
    return out;
  }
  const int n = b.n[0];
  const double h = b.h(0);
  for (int j = 1; j < n - 1; ++j) out[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return out;
}

void check_graph(const WarpedMetric& m, const Eigen::VectorXd& f) {
  if (!f.allFinite()) fail(ErrorKind::InvalidArgument, "graph has non-finite values");
  if (f.minCoeff() <= m.z_lo || f.maxCoeff() >= m.z_hi) fail(ErrorKind::OutOfChart, "graph leaves the z range");
}

namespace {

// Area density L = P W with P = prod a_i(y, f) and W = sqrt(1 + sum p_i^2 / a_i^2), and its partials.
struct Density {
  double L, Lf, Lp[2], P;
};

Density density(const WarpedMetric& m, const Eigen::Vector2d& y, double f, const double* p) {
  double P = 1.0, q = 0.0, Hz = 0.0, s = 0.0;
  double a[2] = {1.0, 1.0}, az[2] = {0.0, 0.0};
  for (int i = 0; i < m.dim; ++i) {
    const WarpSample w = m.at(i, y, f);
    a[i] = w.a;
    az[i] = w.az;
    P *= w.a;
    q += p[i] * p[i] / (w.a * w.a);
    Hz += w.az / w.a;
    s += p[i] * p[i] * w.az / (w.a * w.a * w.a);
  }
  const double W = std::sqrt(1.0 + q);
  Density d;
  d.P = P;
  d.L = P * W;
  d.Lf = P * (Hz * W - s / W);
  for (int i = 0; i < 2; ++i) d.Lp[i] = i < m.dim ? P * p[i] / (a[i] * a[i] * W) : 0.0;
  (void)az;
  return d;
}

}  // namespace

double graph_area(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f) {
  check_graph(m, f);
  if (b.periodic) {
    const Eigen::VectorXd p0 = base_diff(b, f, 0);
    const Eigen::VectorXd p1 = b.dim == 2 ? base_diff(b, f, 1) : Eigen::VectorXd::Zero(f.size());
    double s = 0.0;
    for (int j = 0; j < b.size(); ++j) {
      const double p[2] = {p0[j], p1[j]};
      s += b.weight(j) * density(m, b.node(j), f[j], p).L;
    }
    return s;
  }
  const int n = b.n[0];
  const double h = b.h(0);
  double s = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    const double p[2] = {(f[j + 1] - f[j]) / h, 0.0};
    s += h * density(m, {(j + 0.5) * h, 0.0}, 0.5 * (f[j] + f[j + 1]), p).L;
  }
  return s;
}

Eigen::VectorXd graph_measure(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f) {
  Eigen::VectorXd w(b.size());
  for (int j = 0; j < b.size(); ++j) {
    const Eigen::Vector2d y = b.node(j);
    w[j] = (b.periodic ? b.weight(j) : b.h(0)) * m.volume_factor(y, f[j]);
  }
  return w;
}

Eigen::VectorXd graph_mean_curvature(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f) {
  check_graph(m, f);
  const int N = b.size();
  Eigen::VectorXd H(N);
  if (b.periodic) {
    const Eigen::VectorXd p0 = base_diff(b, f, 0);
    const Eigen::VectorXd p1 = b.dim == 2 ? base_diff(b, f, 1) : Eigen::VectorXd::Zero(N);
    Eigen::VectorXd Lf(N), Lp0(N), Lp1(N), P(N);
    for (int j = 0; j < N; ++j) {
      const double p[2] = {p0[j], p1[j]};
      const Density d = density(m, b.node(j), f[j], p);
      Lf[j] = d.Lf;
      Lp0[j] = d.Lp[0];
      Lp1[j] = d.Lp[1];
      P[j] = d.P;
    }
    Eigen::VectorXd div = base_diff(b, Lp0, 0);
    if (b.dim == 2) div += base_diff(b, Lp1, 1);
    H = (Lf - div).cwiseQuotient(P);
    return H;
  }
  // midpoint area: H_j = (dA/df_j) / (h a(y_j, f_j))
  const int n = b.n[0];
  const double h = b.h(0);
  std::vector<Density> cell(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    const double p[2] = {(f[j + 1] - f[j]) / h, 0.0};
    cell[j] = density(m, {(j + 0.5) * h, 0.0}, 0.5 * (f[j] + f[j + 1]), p);
  }
  for (int j = 1; j < n - 1; ++j) {
    const double g = 0.5 * h * (cell[j - 1].Lf + cell[j].Lf) + cell[j - 1].Lp[0] - cell[j].Lp[0];
    H[j] = g / (h * m.volume_factor(b.node(j), f[j]));
  }
  H[0] = 2.0 * H[1] - H[2];
  H[n - 1] = 2.0 * H[n - 2] - H[n - 3];
  return H;
}

Eigen::VectorXd quad_error(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f) {
  check_graph(m, f);
  const int N = b.size();
  const Eigen::VectorXd p0 = base_diff(b, f, 0);
  const Eigen::VectorXd p1 = b.dim == 2 ? base_diff(b, f, 1) : Eigen::VectorXd::Zero(N);
  Eigen::VectorXd Q(N);
  for (int j = 0; j < N; ++j) {
    const Eigen::Vector2d y = b.node(j);
    const double p[2] = {p0[j], p1[j]};
    double q = 0.0, sff = 0.0, Hf = 0.0;
    for (int i = 0; i < m.dim; ++i) {
      const WarpSample w = m.at(i, y, f[j]);
      q += p[i] * p[i] / (w.a * w.a);
      sff += w.az * p[i] * p[i] / (w.a * w.a * w.a);
      Hf += w.az / w.a;
    }
    const double W = std::sqrt(1.0 + q);
    Q[j] = -sff / W + W * Hf - m.H(y, 0.0) + m.potential(y, 0.0) * f[j];
  }
  return Q;
}

Eigen::VectorXd quad_error_divergence(const WarpedMetric& m, const BaseGrid& b, const Eigen::VectorXd& f) {
  const int N = b.size();
  const Eigen::VectorXd H = graph_mean_curvature(m, b, f);
  const Eigen::VectorXd p0 = base_diff(b, f, 0);
  const Eigen::VectorXd p1 = b.dim == 2 ? base_diff(b, f, 1) : Eigen::VectorXd::Zero(N);
  // flux_i = sqrt(g_f) (grad_{g_f} f)^i / W, then (1/sqrt g_f) d_i flux_i
  Eigen::VectorXd F0(N), F1(N), Pf(N);
  for (int j = 0; j < N; ++j) {
    const Eigen::Vector2d y = b.node(j);
    const double p[2] = {p0[j], p1[j]};
    const Density d = density(m, y, f[j], p);
    F0[j] = d.Lp[0];
    F1[j] = d.Lp[1];
    Pf[j] = d.P;
  }
  Eigen::VectorXd div = base_diff(b, F0, 0);
  if (b.dim == 2) div += base_diff(b, F1, 1);
  Eigen::VectorXd Q(N);
  for (int j = 0; j < N; ++j) {
    const Eigen::Vector2d y = b.node(j);
    Q[j] = H[j] - m.H(y, 0.0) + div[j] / Pf[j] + m.potential(y, 0.0) * f[j];
  }
  return Q;
}

Eigen::MatrixXd JacobiOperator::symmetric() const {
  const Eigen::VectorXd s = mass.cwiseSqrt();
  Eigen::MatrixXd S = s.asDiagonal() * J * s.cwiseInverse().asDiagonal();
  return 0.5 * (S + S.transpose());
}

JacobiOperator jacobi_operator(const WarpedMetric& m, const BaseGrid& b) {
  JacobiOperator op;
  const int N = b.size();
  if (b.periodic) {
    op.nodes.resize(N);
    for (int j = 0; j < N; ++j) op.nodes[j] = j;
    Eigen::VectorXd P(N), V(N), c0(N), c1(N);
    for (int j = 0; j < N; ++j) {
      const Eigen::Vector2d y = b.node(j);
      P[j] = m.volume_factor(y, 0.0);
      V[j] = m.potential(y, 0.0);
      const double a0 = m.at(0, y, 0.0).a;
      c0[j] = P[j] / (a0 * a0);
      c1[j] = 0.0;
      if (b.dim == 2) {
        const double a1 = m.at(1, y, 0.0).a;
        c1[j] = P[j] / (a1 * a1);
      }
    }
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(N, N);
    for (int axis = 0; axis < b.dim; ++axis) {
      const Eigen::MatrixXd D1 = fourier_diff_matrix(b.n[axis], b.L[axis]);
      Eigen::MatrixXd D = D1;
      if (b.dim == 2) {
        D.setZero(N, N);
        for (int r = 0; r < N; ++r) {
          const int r0 = r / b.n[1], r1 = r % b.n[1];
          if (axis == 0)
            for (int k = 0; k < b.n[0]; ++k) D(r, k * b.n[1] + r1) = D1(r0, k);
          else
            for (int k = 0; k < b.n[1]; ++k) D(r, r0 * b.n[1] + k) = D1(r1, k);
        }
      }
      const Eigen::VectorXd& c = axis == 0 ? c0 : c1;
      lap += D * c.asDiagonal() * D;
    }
    op.J = -(P.cwiseInverse().asDiagonal() * lap);
    op.J.diagonal() -= V;
    op.V = V;
    op.mass.resize(N);
    for (int j = 0; j < N; ++j) op.mass[j] = b.weight(j) * P[j];
    return op;
  }
  if (b.dim != 1) fail(ErrorKind::InvalidArgument, "interval bases are one-dimensional");
  const int n = b.n[0], M = n - 2;
  const double h = b.h(0);
  for (int j = 1; j < n - 1; ++j) op.nodes.push_back(j);
  op.J = Eigen::MatrixXd::Zero(M, M);
  op.V.resize(M);
  op.mass.resize(M);
  auto coef = [&](double y) {
    const double a = m.at(0, {y, 0.0}, 0.0).a;
    return 1.0 / a;  // P / a^2 with P = a
  };
  for (int r = 0; r < M; ++r) {
    const int j = r + 1;
    const Eigen::Vector2d y = b.node(j);
    const double P = m.volume_factor(y, 0.0);
    const double cl = coef((j - 0.5) * h), cr = coef((j + 0.5) * h);
    op.J(r, r) = (cl + cr) / (P * h * h);
    if (r > 0) op.J(r, r - 1) = -cl / (P * h * h);
    if (r + 1 < M) op.J(r, r + 1) = -cr / (P * h * h);
    op.V[r] = m.potential(y, 0.0);
    op.J(r, r) -= op.V[r];
    op.mass[r] = h * P;
  }
  return op;
}

double jacobi_gap(const JacobiOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.symmetric(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs2().minCoeff();
}

MinimalGraph minimal_graph(const WarpedMetric& m, const BaseGrid& b, double left, double right, double t,
                           double tol, int max_iter) {
  if (b.periodic || b.dim != 1) fail(ErrorKind::InvalidArgument, "minimal_graph needs an interval base");
  const int n = b.n[0], M = n - 2;
  const double L = b.L[0];
  MinimalGraph out;
  out.f.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s = b.node(j)[0] / L;
    out.f[j] = (1.0 - s) * left + s * right + t;
  }
  auto interior = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd { return graph_mean_curvature(m, b, f).segment(1, M); };
  Eigen::VectorXd r = interior(out.f);
  out.residual = r.cwiseAbs().maxCoeff();
  for (; out.iterations < max_iter && out.residual > tol; ++out.iterations) {
    // tridiagonal Jacobian by three-coloured finite differences
    std::vector<Eigen::Triplet<double>> trip;
    const double del = 1e-7;
    for (int color = 0; color < 3; ++color) {
      Eigen::VectorXd fp = out.f;
      for (int k = 1 + color; k < n - 1; k += 3) fp[k] += del;
      const Eigen::VectorXd rp = interior(fp);
      for (int k = 1 + color; k < n - 1; k += 3)
        for (int row = k - 2; row <= k; ++row)
          if (row >= 0 && row < M) trip.emplace_back(row, k - 1, (rp[row] - r[row]) / del);
    }
    Eigen::SparseMatrix<double> Jm(M, M);
    Jm.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Jm);
    if (lu.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "minimal graph jacobian is singular");
    const Eigen::VectorXd step = lu.solve(r);
    out.f.segment(1, M) -= step;
    r = interior(out.f);
    out.residual = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(out.residual)) break;
  }
  if (!(out.residual <= tol)) {
    std::ostringstream os;
    os << "minimal graph newton stalled; last residual " << out.residual;
    fail(ErrorKind::NumericFailure, os.str());
  }
  return out;
}

std::vector<MinimalGraph> minimal_graph_family(const WarpedMetric& m, const BaseGrid& b, double left,
                                               double right, const std::vector<double>& ts, double tol) {
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<MinimalGraph> out;
  for (double t : sorted) {
    out.push_back(minimal_graph(m, b, left, right, t, tol));
    if (out.size() > 1) {
      const Eigen::VectorXd gap = out.back().f - out[out.size() - 2].f;
      if (!(gap.minCoeff() > 0.0)) {
        std::ostringstream os;
        os << "minimal graphs for t = " << sorted[out.size() - 2] << " and " << t << " touch or cross";
        fail(ErrorKind::FoliationViolation, os.str());
      }
    }
  }
  return out;
}

void write_geometry_csv(const std::string& path, const WarpedMetric& m, const BaseGrid& b,
                        const std::vector<double>& zs) {
  FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorKind::ConfigError, "cannot write " + path);
  std::fprintf(fp, "y,z,H_z,sff2\n");
  for (int j = 0; j < b.size(); ++j)
    for (double z : zs) {
      const Eigen::Vector2d y = b.node(j);
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", y[0], z, m.H(y, z), m.sff_norm2(y, z));
    }
  std::fclose(fp);
}

}  // namespace aclab
