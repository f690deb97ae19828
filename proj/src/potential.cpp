#include "aclab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "aclab/error.hpp"
#include "aclab/heteroclinic.hpp"
#include "aclab/quadrature.hpp"

namespace aclab {

DoubleWell standard_well() {
  DoubleWell w;
  w.is_standard = true;
  w.label = "standard";
  w.eval = [](int k, double t) {
    switch (k) {
      case 0: {
        const double p = 1.0 - t * t;
        return 0.25 * p * p;
      }
      case 1: return t * t * t - t;
      case 2: return 3.0 * t * t - 1.0;
      case 3: return 6.0 * t;
      default: fail(ErrorKind::InvalidArgument, "derivative order must be 0..3");
    }
  };
  return w;
}

DoubleWell sextic_well(double c) {
  DoubleWell w;
  w.label = "sextic:" + std::to_string(c);
  w.eval = [c](int k, double t) {
    // W = (p^2 + c p^3)/4 with p = 1 - t^2
    const double p = 1.0 - t * t;
    const double dp = -2.0 * t;
    const double d2p = -2.0;
    const double q0 = 0.25 * (p * p + c * p * p * p);
    const double q1 = 0.25 * (2.0 * p + 3.0 * c * p * p);
    const double q2 = 0.25 * (2.0 + 6.0 * c * p);
    const double q3 = 0.25 * (6.0 * c);
    switch (k) {
      case 0: return q0;
      case 1: return q1 * dp;
      case 2: return q2 * dp * dp + q1 * d2p;
      case 3: return q3 * dp * dp * dp + 3.0 * q2 * dp * d2p;
      default: fail(ErrorKind::InvalidArgument, "derivative order must be 0..3");
    }
  };
  return w;
}

namespace {

struct Spline {
  std::vector<double> x, y, m;  // m = second derivatives at nodes

  void build() {
    const std::size_t n = x.size();
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
  }

  double eval(int k, double t) const {
    const std::size_t n = x.size();
    std::size_t i = std::upper_bound(x.begin(), x.end(), t) - x.begin();
    i = std::clamp<std::size_t>(i, 1, n - 1);
    const double h = x[i] - x[i - 1];
    const double A = (x[i] - t) / h, B = (t - x[i - 1]) / h;
    switch (k) {
      case 0:
        return A * y[i - 1] + B * y[i] + ((A * A * A - A) * m[i - 1] + (B * B * B - B) * m[i]) * h * h / 6.0;
      case 1:
        return (y[i] - y[i - 1]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m[i - 1] +
               (3.0 * B * B - 1.0) / 6.0 * h * m[i];
      case 2: return A * m[i - 1] + B * m[i];
      case 3: return (m[i] - m[i - 1]) / h;
      default: fail(ErrorKind::InvalidArgument, "derivative order must be 0..3");
    }
  }
};

}  // namespace

DoubleWell tabulated_well(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open well table " + path);
  auto sp = std::make_shared<Spline>();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t, w;
    if (!(ls >> t >> w)) {
      std::ostringstream os;
      os << "malformed well table line " << lineno << " in " << path;
      fail(ErrorKind::ConfigError, os.str());
    }
    if (!sp->x.empty() && t <= sp->x.back())
      fail(ErrorKind::ConfigError, "well table t values must be strictly increasing");
    sp->x.push_back(t);
    sp->y.push_back(w);
  }
  if (sp->x.size() < 8) fail(ErrorKind::ConfigError, "well table needs at least 8 rows");
  if (sp->x.front() > -1.0 || sp->x.back() < 1.0)
    fail(ErrorKind::ConfigError, "well table must cover [-1, 1]");
  sp->build();
  DoubleWell w;
  w.label = "custom:" + path;
  w.eval = [sp](int k, double t) {
    if (k < 0 || k > 3) fail(ErrorKind::InvalidArgument, "derivative order must be 0..3");
    return sp->eval(k, t);
  };
  return w;
}

DoubleWell well_from_id(const std::string& id) {
  DoubleWell w;
  double w2_tol = 1e-10;
  if (id == "standard") {
    w = standard_well();
  } else if (id.rfind("sextic:", 0) == 0) {
    w = sextic_well(std::stod(id.substr(7)));
  } else if (id.rfind("custom:", 0) == 0) {
    w = tabulated_well(id.substr(7));
    w2_tol = 1e-3;
  } else {
    fail(ErrorKind::ConfigError, "unknown well id '" + id + "'");
  }
  WellReport r = check_well(w, 10000, w2_tol);
  if (!r.ok) fail(ErrorKind::InvalidArgument, "well '" + id + "' rejected: " + r.failure);
  return w;
}

double eval_w(const DoubleWell& well, int k, double t) {
  if (k < 0 || k > 3) fail(ErrorKind::InvalidArgument, "derivative order must be 0..3");
  if (!std::isfinite(t)) fail(ErrorKind::InvalidArgument, "t must be finite");
  return well.eval(k, t);
}

WellReport check_well(const DoubleWell& well, int n, double w2_tol) {
  WellReport r;
  auto bad = [&](const std::string& s) {
    if (r.ok) r.failure = s;
    r.ok = false;
  };
  if (well.eval(0, 1.0) != 0.0 || well.eval(0, -1.0) != 0.0) bad("W(+-1) != 0");
  if (std::abs(well.eval(1, 0.0)) > 1e-14) bad("W'(0) != 0");
  if (std::abs(well.eval(2, 0.0)) < 1e-8) bad("W''(0) == 0");
  r.w2_plus = well.eval(2, 1.0);
  r.w2_minus = well.eval(2, -1.0);
  if (std::abs(r.w2_plus - 2.0) > w2_tol || std::abs(r.w2_minus - 2.0) > w2_tol)
    bad("W''(+-1) != 2 (no automatic rescaling)");
  r.min_w = well.eval(0, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double t = -1.0 + 2.0 * i / n;
    const double w0 = well.eval(0, t);
    r.min_w = std::min(r.min_w, w0);
    if (w0 < 0.0) bad("W < 0 somewhere");
    const double defect = std::abs(w0 - well.eval(0, -t));
    r.parity_defect = std::max(r.parity_defect, defect);
    if (defect > 1e-12) bad("W not even");
    if (std::abs(t) > 0.0 && std::abs(t) < 1.0 && !(t * well.eval(1, t) < 0.0))
      bad("t W'(t) >= 0 inside (-1, 1)");
  }
  return r;
}

void validate_well(const DoubleWell& well, int n) {
  WellReport r = check_well(well, n);
  if (!r.ok) fail(ErrorKind::InvalidArgument, "well '" + well.label + "' rejected: " + r.failure);
}

double h0_quadrature(const DoubleWell& well, double quad_tol, double* achieved_error) {
  if (!(quad_tol > 0.0)) fail(ErrorKind::InvalidArgument, "quad_tol must be positive");
  auto f = [&](double t) { return std::sqrt(2.0 * std::max(0.0, well.eval(0, t))); };
  QuadResult r = integrate(f, -1.0, 1.0, quad_tol);
  if (!r.converged) {
    std::ostringstream os;
    os << "h0 quadrature did not converge; achieved error " << r.error;
    fail(ErrorKind::NumericFailure, os.str());
  }
  if (achieved_error) *achieved_error = r.error;
  return r.value;
}

WellConstants well_constants(const DoubleWell& well, double quad_tol, double t_lo, double t_hi) {
  WellConstants c;
  c.h0 = h0_quadrature(well, quad_tol, &c.h0_error);
  auto wp = std::make_shared<DoubleWell>(well);
  Profile p = solve_profile(wp, 16.0, 8192);
  TailFit plus = fit_tail(p, t_lo, t_hi, +1);
  TailFit minus = fit_tail(p, t_lo, t_hi, -1);
  c.A0 = plus.A0;
  c.A0_minus = minus.A0;
  c.fit_residual_plus = plus.residual;
  c.fit_residual_minus = minus.residual;
  return c;
}

}  // namespace aclab
