#include "aclab/field.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aclab/error.hpp"

namespace aclab {

FieldGrid make_field_grid(const BaseGrid& base, double z_lo, double z_hi, int nz, bool z_periodic) {
  if (base.dim != 1) fail(ErrorKind::InvalidArgument, "phase fields use a one-dimensional base");
  if (!(z_hi > z_lo)) fail(ErrorKind::InvalidArgument, "empty z range");
  if (nz < 5) fail(ErrorKind::InvalidArgument, "nz must be >= 5");
  FieldGrid g;
  g.base = base;
  g.nz = nz;
  g.z_lo = z_lo;
  g.z_hi = z_hi;
  g.z_periodic = z_periodic;
  return g;
}

Eigen::VectorXd FieldSetup::restrict_free(const Eigen::VectorXd& u) const {
  Eigen::VectorXd r(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) r[k] = u[free[k]];
  return r;
}

SetupPtr make_setup(const FieldGrid& g, const WarpedMetric& metric, WellPtr well) {
  if (!well) fail(ErrorKind::InvalidArgument, "null well");
  if (g.z_lo <= metric.z_lo || g.z_hi >= metric.z_hi) fail(ErrorKind::OutOfChart, "field grid leaves the metric chart");
  auto s = std::make_shared<FieldSetup>();
  s->grid = g;
  s->metric = metric;
  s->well = std::move(well);
  const int ny = g.ny(), nz = g.nz, N = g.size();
  const double hy = g.hy(), hz = g.hz();
  const bool yper = g.base.periodic;
  auto a = [&](double y, double z) { return metric.at(0, {y, 0.0}, z).a; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(8 * N);
  auto edge = [&](int p, int q, double c) {
    trip.emplace_back(p, p, c);
    trip.emplace_back(q, q, c);
    trip.emplace_back(p, q, -c);
    trip.emplace_back(q, p, -c);
  };
  s->w.resize(N);
  for (int i = 0; i < ny; ++i) {
    const double wy = (!yper && (i == 0 || i == ny - 1)) ? 0.5 * hy : hy;
    for (int j = 0; j < nz; ++j) {
      const double wz = (!g.z_periodic && (j == 0 || j == nz - 1)) ? 0.5 * hz : hz;
      const double y = g.y(i), z = g.z(j);
      s->w[g.index(i, j)] = a(y, z) * wy * wz;
      if (yper || i + 1 < ny) {
        const int ip = (i + 1) % ny;
        edge(g.index(i, j), g.index(ip, j), wz / (hy * a(y + 0.5 * hy, z)));
      }
      if (g.z_periodic || j + 1 < nz) {
        const int jp = (j + 1) % nz;
        edge(g.index(i, j), g.index(i, jp), wy * a(y, z + 0.5 * hz) / hz);
      }
    }
  }
  s->S.resize(N, N);
  s->S.setFromTriplets(trip.begin(), trip.end());
  s->slot.assign(N, -1);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j)
      if (!g.fixed(i, j)) {
        s->slot[g.index(i, j)] = static_cast<int>(s->free.size());
        s->free.push_back(g.index(i, j));
      }
  const int M = static_cast<int>(s->free.size());
  std::vector<Eigen::Triplet<double>> tf;
  for (int k = 0; k < s->S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(s->S, k); it; ++it) {
      const int r = s->slot[it.row()], c = s->slot[it.col()];
      if (r >= 0 && c >= 0) tf.emplace_back(r, c, it.value());
    }
  s->S_ff.resize(M, M);
  s->S_ff.setFromTriplets(tf.begin(), tf.end());
  return s;
}

PhaseField make_field(SetupPtr setup, double eps, const Eigen::VectorXd& u) {
  if (!setup) fail(ErrorKind::InvalidArgument, "null setup");
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "eps must be positive");
  if (setup->grid.hz() > eps / 8.0 * (1.0 + 1e-12))
    fail(ErrorKind::InvalidArgument, "grid does not resolve eps: need at least 8 nodes per eps in z");
  if (u.size() != setup->grid.size()) fail(ErrorKind::InvalidArgument, "field size does not match the grid");
  PhaseField f;
  f.setup = std::move(setup);
  f.eps = eps;
  f.u = u;
  return f;
}

PhaseField constant_field(SetupPtr setup, double eps, double value) {
  const int N = setup->grid.size();
  return make_field(std::move(setup), eps, Eigen::VectorXd::Constant(N, value));
}

namespace {

Eigen::VectorXd apply_w(const DoubleWell& well, int k, const Eigen::VectorXd& u) {
  Eigen::VectorXd r(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) r[i] = well.eval(k, u[i]);
  return r;
}

}  // namespace

double energy(const PhaseField& f) {
  const FieldSetup& s = *f.setup;
  const double grad = f.u.dot(s.S * f.u);
  return 0.5 * f.eps * grad + s.w.dot(apply_w(*s.well, 0, f.u)) / f.eps;
}

Eigen::VectorXd residual(const PhaseField& f) {
  const FieldSetup& s = *f.setup;
  const Eigen::VectorXd Su = s.S * f.u;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(f.u.size());
  const double e2 = f.eps * f.eps;
  for (int p : s.free) r[p] = -e2 * Su[p] / s.w[p] - s.well->eval(1, f.u[p]);
  return r;
}

double residual_sup(const PhaseField& f) { return residual(f).cwiseAbs().maxCoeff(); }

double varifold_mass(const PhaseField& f, double h0) {
  return f.eps * f.u.dot(f.setup->S * f.u) / h0;
}

double bound_excess(const PhaseField& f) { return f.u.cwiseAbs().maxCoeff() - 1.0; }

Eigen::SparseMatrix<double> hessian_free(const PhaseField& f) {
  const FieldSetup& s = *f.setup;
  Eigen::SparseMatrix<double> H = f.eps * s.S_ff;
  for (std::size_t k = 0; k < s.free.size(); ++k) {
    const int p = s.free[k];
    H.coeffRef(k, k) += s.w[p] * s.well->eval(2, f.u[p]) / f.eps;
  }
  return H;
}

PhaseField gradient_flow(const PhaseField& f, double dt, int steps, FlowTrace* trace, double stabilizer) {
  if (!(dt > 0.0) || steps < 1) fail(ErrorKind::InvalidArgument, "need dt > 0 and steps >= 1");
  const FieldSetup& s = *f.setup;
  const int M = static_cast<int>(s.free.size());
  const double e2 = f.eps * f.eps;
  Eigen::VectorXd wf(M);
  for (int k = 0; k < M; ++k) wf[k] = s.w[s.free[k]];
  Eigen::SparseMatrix<double> A = e2 * s.S_ff;
  for (int k = 0; k < M; ++k) A.coeffRef(k, k) += wf[k] * (1.0 / dt + stabilizer);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "gradient flow matrix factorization failed");
  PhaseField g = f;
  // coupling to Dirichlet values
  Eigen::VectorXd ud = g.u;
  for (int p : s.free) ud[p] = 0.0;
  const Eigen::VectorXd coupling = s.restrict_free(s.S * ud);
  double E = energy(g);
  if (trace) trace->energies.push_back(E);
  for (int step = 0; step < steps; ++step) {
    Eigen::VectorXd uf = s.restrict_free(g.u);
    Eigen::VectorXd rhs(M);
    for (int k = 0; k < M; ++k)
      rhs[k] = wf[k] * (uf[k] / dt + stabilizer * uf[k] - s.well->eval(1, uf[k])) - e2 * coupling[k];
    uf = llt.solve(rhs);
    for (int k = 0; k < M; ++k) g.u[s.free[k]] = uf[k];
    const double En = energy(g);
    const double inc = En - E;
    if (trace) {
      trace->energies.push_back(En);
      trace->max_increase = std::max(trace->max_increase, inc);
    }
    if (inc > 1e-12 * std::max(1.0, std::abs(E))) {
      std::ostringstream os;
      os << "energy increased by " << inc << " at step " << step << "; reduce dt";
      fail(ErrorKind::StepSize, os.str());
    }
    E = En;
  }
  return g;
}

PhaseField newton_solve(const PhaseField& f0, double tol, int max_iter, NewtonReport* report) {
  const FieldSetup& s = *f0.setup;
  const int M = static_cast<int>(s.free.size());
  const double e2 = f0.eps * f0.eps;
  PhaseField f = f0;
  NewtonReport rep;
  Eigen::VectorXd r = residual(f);
  double sup = r.cwiseAbs().maxCoeff();
  rep.residuals.push_back(sup);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  while (sup > tol && rep.iterations < max_iter) {
    Eigen::SparseMatrix<double> J = e2 * s.S_ff;
    Eigen::VectorXd rhs(M);
    for (int k = 0; k < M; ++k) {
      const int p = s.free[k];
      J.coeffRef(k, k) += s.w[p] * s.well->eval(2, f.u[p]);
      rhs[k] = s.w[p] * r[p];
    }
    if (!analyzed) {
      ldlt.analyzePattern(J);
      analyzed = true;
    }
    ldlt.factorize(J);
    if (ldlt.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "newton jacobian factorization failed");
    const Eigen::VectorXd delta = ldlt.solve(rhs);
    if (!delta.allFinite()) fail(ErrorKind::NumericFailure, "newton step is not finite");
    const double norm0 = r.norm();
    double alpha = 1.0;
    PhaseField trial = f;
    Eigen::VectorXd rt;
    for (int bt = 0; bt < 12; ++bt) {
      trial.u = f.u;
      for (int k = 0; k < M; ++k) trial.u[s.free[k]] += alpha * delta[k];
      rt = residual(trial);
      if (rt.norm() < norm0 || bt == 11) break;
      alpha *= 0.5;
    }
    f = trial;
    r = rt;
    sup = r.cwiseAbs().maxCoeff();
    ++rep.iterations;
    rep.residuals.push_back(sup);
    if (!std::isfinite(sup)) break;
  }
  rep.converged = sup <= tol;
  if (report) *report = rep;
  if (!rep.converged) {
    std::ostringstream os;
    os << "newton did not converge after " << rep.iterations << " iterations; residual trace:";
    for (double v : rep.residuals) os << ' ' << v;
    fail(ErrorKind::NumericFailure, os.str());
  }
  return f;
}

Eigen::VectorXd column(const PhaseField& f, int i) {
  const int nz = f.grid().nz;
  return f.u.segment(static_cast<Eigen::Index>(i) * nz, nz);
}

namespace {

constexpr char kMagic[8] = {'A', 'C', 'L', 'A', 'B', 'F', '0', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  unsigned char b[sizeof(T)];
  in.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!in) fail(ErrorKind::ConfigError, "truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const PhaseField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::ConfigError, "cannot write " + path);
  out.write(kMagic, 8);
  put<std::int32_t>(out, f.grid().ny());
  put<std::int32_t>(out, f.grid().nz);
  put<double>(out, f.eps);
  const std::string& id = f.setup->metric.id;
  put<std::int32_t>(out, static_cast<std::int32_t>(id.size()));
  out.write(id.data(), static_cast<std::streamsize>(id.size()));
  for (Eigen::Index k = 0; k < f.u.size(); ++k) put<double>(out, f.u[k]);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ConfigError, "cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) fail(ErrorKind::ConfigError, "not a field checkpoint: " + path);
  Checkpoint c;
  c.ny = get<std::int32_t>(in);
  c.nz = get<std::int32_t>(in);
  c.eps = get<double>(in);
  const int len = get<std::int32_t>(in);
  if (len < 0 || len > 4096) fail(ErrorKind::ConfigError, "bad metric id length in checkpoint");
  c.metric_id.resize(len);
  in.read(c.metric_id.data(), len);
  c.u.resize(static_cast<Eigen::Index>(c.ny) * c.nz);
  for (Eigen::Index k = 0; k < c.u.size(); ++k) c.u[k] = get<double>(in);
  return c;
}

}  // namespace aclab
