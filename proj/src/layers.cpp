#include "aclab/layers.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "aclab/error.hpp"

namespace aclab {

std::shared_ptr<const Profile> layer_profile(WellPtr well) {
  static std::mutex mu;
  static std::shared_ptr<const Profile> standard;
  if (well->is_standard) {
    std::lock_guard<std::mutex> lock(mu);
    if (!standard) standard = std::make_shared<Profile>(solve_profile(well, 32.0, 16384));
    return standard;
  }
  return std::make_shared<Profile>(solve_profile(well, 32.0, 16384));
}

std::shared_ptr<const TruncatedProfile> layer_truncation(WellPtr well, double eps) {
  return std::make_shared<TruncatedProfile>(layer_profile(well), 3.0 * std::abs(std::log(eps)));
}

namespace {

double point_segment_distance(double py, double pz, double y0, double z0, double y1, double z1) {
  const double dy = y1 - y0, dz = z1 - z0;
  const double len2 = dy * dy + dz * dz;
  double t = len2 > 0.0 ? ((py - y0) * dy + (pz - z0) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ey = py - (y0 + t * dy), ez = pz - (z0 + t * dz);
  return std::sqrt(ey * ey + ez * ez);
}

}  // namespace

Eigen::VectorXd signed_distance(const FieldSetup& s, const Eigen::VectorXd& fs) {
  const FieldGrid& g = s.grid;
  const int ny = g.ny(), nz = g.nz;
  Eigen::VectorXd d(g.size());
  const bool constant = fs.maxCoeff() - fs.minCoeff() <= 1e-14 * (1.0 + fs.cwiseAbs().maxCoeff());
  if (constant) {
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nz; ++j) d[g.index(i, j)] = g.z(j) - fs[0];
    return d;
  }
  if (s.metric.is_flat) {
    // exact distance to the polyline through the sheet nodes (periodic copies included)
    const double L = g.base.L[0];
    std::vector<double> ys, zs;
    const int reps = g.base.periodic ? 1 : 0;
    for (int r = -reps; r <= reps; ++r) {
      for (int i = 0; i < ny; ++i) {
        ys.push_back(g.y(i) + r * L);
        zs.push_back(fs[i]);
      }
    }
    if (g.base.periodic) {
      ys.push_back(g.y(0) + (reps + 1) * L);
      zs.push_back(fs[0]);
    }
    const int m = static_cast<int>(ys.size());
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nz; ++j) {
        const double py = g.y(i), pz = g.z(j);
        double best = std::abs(pz - fs[i]);
        for (int k = 0; k + 1 < m; ++k) {
          const double ylo = std::min(ys[k], ys[k + 1]) - best, yhi = std::max(ys[k], ys[k + 1]) + best;
          if (py < ylo || py > yhi) continue;
          best = std::min(best, point_segment_distance(py, pz, ys[k], zs[k], ys[k + 1], zs[k + 1]));
        }
        d[g.index(i, j)] = pz >= fs[i] ? best : -best;
      }
    return d;
  }
  const Eigen::VectorXd fp = base_diff(g.base, fs, 0);
  for (int i = 0; i < ny; ++i) {
    const double a = s.metric.at(0, {g.y(i), 0.0}, fs[i]).a;
    const double scale = 1.0 / std::sqrt(1.0 + fp[i] * fp[i] / (a * a));
    for (int j = 0; j < nz; ++j) d[g.index(i, j)] = (g.z(j) - fs[i]) * scale;
  }
  return d;
}

PhaseField superpose(SetupPtr setup, const TruncatedProfile& trunc, double eps,
                     const std::vector<Eigen::VectorXd>& sheets, const std::vector<Eigen::VectorXd>& offsets) {
  const FieldGrid& g = setup->grid;
  const int Q = static_cast<int>(sheets.size());
  if (static_cast<int>(offsets.size()) != Q) fail(ErrorKind::InvalidArgument, "one offset per sheet required");
  for (int l = 0; l < Q; ++l)
    if (sheets[l].size() != g.ny() || offsets[l].size() != g.ny())
      fail(ErrorKind::InvalidArgument, "sheet arrays must live on the base nodes");
  for (int l = 0; l + 1 < Q; ++l)
    if ((sheets[l + 1] - sheets[l]).minCoeff() < 4.0 * eps)
      fail(ErrorKind::InvalidArgument, "sheets must be ordered and separated by at least 4 eps");
  Eigen::VectorXd U = Eigen::VectorXd::Constant(g.size(), ((Q % 2 == 1 ? 1.0 : -1.0) - 1.0) / 2.0);
  for (int l = 0; l < Q; ++l) {
    const Eigen::VectorXd d = signed_distance(*setup, sheets[l]);
    const double sg = l % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < g.ny(); ++i)
      for (int j = 0; j < g.nz; ++j) {
        const int p = g.index(i, j);
        U[p] += trunc.eval(0, sg * (d[p] - offsets[l][i]) / eps);
      }
  }
  return make_field(std::move(setup), eps, U);
}

namespace {

// Root of the interpolating polynomial through (zs, us) inside [lo, hi] where it changes sign.
double local_root(const std::vector<double>& zs, const std::vector<double>& us, double lo, double hi) {
  auto poly = [&](double x) {
    double s = 0.0;
    for (std::size_t a = 0; a < zs.size(); ++a) {
      double l = us[a];
      for (std::size_t b = 0; b < zs.size(); ++b)
        if (a != b) l *= (x - zs[b]) / (zs[a] - zs[b]);
      s += l;
    }
    return s;
  };
  double flo = poly(lo), fhi = poly(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) return lo - flo * (hi - lo) / (fhi - flo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = poly(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LayerStack nodal_layers(const PhaseField& f) {
  const FieldGrid& g = f.grid();
  const int ny = g.ny(), nz = g.nz;
  std::vector<std::vector<double>> roots(ny);
  for (int i = 0; i < ny; ++i) {
    const Eigen::VectorXd c = column(f, i);
    const int jmax = g.z_periodic ? nz : nz - 1;
    for (int j = 0; j < jmax; ++j) {
      const int jn = (j + 1) % nz;
      const double a = c[j], b = c[jn];
      if (a == 0.0 && j > 0 && c[j - 1] != 0.0) {
        roots[i].push_back(g.z(j));
        continue;
      }
      if (!(a * b < 0.0)) continue;
      std::vector<double> zs, us;
      for (int k = j - 2; k <= j + 3; ++k) {
        int kk = k;
        if (g.z_periodic) {
          kk = ((k % nz) + nz) % nz;
        } else if (k < 0 || k >= nz) {
          continue;
        }
        zs.push_back(g.z(j) + (k - j) * g.hz());
        us.push_back(c[kk]);
      }
      roots[i].push_back(local_root(zs, us, g.z(j), g.z(j) + g.hz()));
    }
  }
  LayerStack st;
  st.Q = static_cast<int>(roots[0].size());
  for (int i = 1; i < ny; ++i)
    if (static_cast<int>(roots[i].size()) != st.Q) {
      std::ostringstream os;
      os << "nodal set is not graphical: column 0 has " << st.Q << " crossings, column " << i << " has "
         << roots[i].size();
      fail(ErrorKind::Topology, os.str());
    }
  st.f.assign(st.Q, Eigen::VectorXd(ny));
  st.h.assign(st.Q, Eigen::VectorXd::Zero(ny));
  for (int l = 0; l < st.Q; ++l)
    for (int i = 0; i < ny; ++i) st.f[l][i] = roots[i][l];
  st.D.assign(st.Q, Eigen::VectorXd::Constant(ny, std::numeric_limits<double>::infinity()));
  for (int l = 0; l < st.Q; ++l) {
    if (l > 0) st.D[l] = st.D[l].cwiseMin(st.f[l] - st.f[l - 1]);
    if (l + 1 < st.Q) st.D[l] = st.D[l].cwiseMin(st.f[l + 1] - st.f[l]);
    st.slope_sup.push_back(base_diff(g.base, st.f[l], 0).cwiseAbs().maxCoeff());
  }
  return st;
}

LayerStack fit_offsets(const PhaseField& f, const LayerStack& stack, const TruncatedProfile& trunc) {
  const FieldSetup& s = *f.setup;
  const FieldGrid& g = s.grid;
  const int ny = g.ny(), nz = g.nz, Q = stack.Q;
  const double eps = f.eps, hz = g.hz();
  LayerStack out = stack;
  if (Q == 0) {
    out.phi = f.u - Eigen::VectorXd::Constant(g.size(), -1.0);
    out.phi_sup = out.phi.cwiseAbs().maxCoeff();
    return out;
  }
  std::vector<Eigen::VectorXd> d(Q), dz(Q);
  for (int l = 0; l < Q; ++l) {
    d[l] = signed_distance(s, stack.f[l]);
    dz[l].resize(g.size());
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nz; ++j) {
        const int jm = std::max(j - 1, 0), jp = std::min(j + 1, nz - 1);
        dz[l][g.index(i, j)] = (d[l][g.index(i, jp)] - d[l][g.index(i, jm)]) / ((jp - jm) * hz);
      }
  }
  Eigen::VectorXd wz = Eigen::VectorXd::Constant(nz, hz);
  if (!g.z_periodic) wz[0] = wz[nz - 1] = 0.5 * hz;
  const double base = ((Q % 2 == 1 ? 1.0 : -1.0) - 1.0) / 2.0;
  auto sheet_term = [&](int l, int p, double hv, int k) {
    const double sg = l % 2 == 0 ? 1.0 : -1.0;
    return trunc.eval(k, sg * (d[l][p] - hv) / eps);
  };
  // g(h) and g'(h) for sheet l on column i with the other sheets frozen
  auto orth = [&](int l, int i, double hv, double* deriv) {
    const double sg = l % 2 == 0 ? 1.0 : -1.0;
    double val = 0.0, der = 0.0;
    for (int j = 0; j < nz; ++j) {
      const int p = g.index(i, j);
      double U = base;
      for (int m = 0; m < Q; ++m) U += m == l ? sheet_term(l, p, hv, 0) : sheet_term(m, p, out.h[m][i], 0);
      const double H1 = sheet_term(l, p, hv, 1), H2 = sheet_term(l, p, hv, 2);
      const double psi = sg * H1 * dz[l][p] / eps;
      val += wz[j] * (f.u[p] - U) * psi;
      der += wz[j] * (sg * H1 / eps * psi - (f.u[p] - U) * H2 * dz[l][p] / (eps * eps));
    }
    if (deriv) *deriv = der;
    return val;
  };
  double change = 1.0;
  for (out.sweeps = 0; out.sweeps < 60 && change > 1e-14 * eps; ++out.sweeps) {
    change = 0.0;
    for (int l = 0; l < Q; ++l)
      for (int i = 0; i < ny; ++i) {
        double hv = out.h[l][i];
        double lo = hv - 3.0 * eps, hi = hv + 3.0 * eps;
        double glo = orth(l, i, lo, nullptr), ghi = orth(l, i, hi, nullptr);
        const bool bracket = glo * ghi <= 0.0;
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
          double der;
          const double gv = orth(l, i, hv, &der);
          if (std::abs(gv) * eps < 1e-15) {
            ok = true;
            break;
          }
          double next = der != 0.0 ? hv - gv / der : 0.5 * (lo + hi);
          if (bracket) {
            if ((gv < 0.0) == (glo < 0.0)) {
              lo = hv;
              glo = gv;
            } else {
              hi = hv;
            }
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
          }
          if (std::abs(next - hv) <= 1e-15 * eps) {
            hv = next;
            ok = true;
            break;
          }
          hv = next;
          if (!std::isfinite(hv) || std::abs(hv) > 10.0 * eps) break;
        }
        if (!ok) {
          std::ostringstream os;
          os << "offset fit failed on sheet " << l + 1 << ", column " << i;
          fail(ErrorKind::NumericFailure, os.str());
        }
        change = std::max(change, std::abs(hv - out.h[l][i]));
        out.h[l][i] = hv;
      }
    if (Q == 1) {
      ++out.sweeps;
      break;
    }
  }
  out.phi = f.u;
  out.phi.array() -= base;
  for (int l = 0; l < Q; ++l)
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nz; ++j) {
        const int p = g.index(i, j);
        out.phi[p] -= sheet_term(l, p, out.h[l][i], 0);
      }
  out.orth_residual = 0.0;
  for (int l = 0; l < Q; ++l)
    for (int i = 0; i < ny; ++i) out.orth_residual = std::max(out.orth_residual, eps * std::abs(orth(l, i, out.h[l][i], nullptr)));
  out.phi_sup = out.phi.cwiseAbs().maxCoeff();
  out.h_sup_over_eps = 0.0;
  for (int l = 0; l < Q; ++l) out.h_sup_over_eps = std::max(out.h_sup_over_eps, out.h[l].cwiseAbs().maxCoeff() / eps);
  return out;
}

EnhancedReport enhanced_sff(const PhaseField& f, double beta) {
  const FieldSetup& s = *f.setup;
  const FieldGrid& g = s.grid;
  const int ny = g.ny(), nz = g.nz;
  const double hy = g.hy(), hz = g.hz();
  const bool yper = g.base.periodic;
  EnhancedReport rep;
  auto U = [&](int i, int j) { return f.u[g.index(((i % ny) + ny) % ny, j)]; };
  for (int i = 0; i < ny; ++i) {
    if (!yper && (i == 0 || i == ny - 1)) continue;
    for (int j = 1; j < nz - 1; ++j) {
      const double u = U(i, j);
      if (std::abs(u) > 1.0 - beta) continue;
      const double y = g.y(i), z = g.z(j);
      const WarpSample w = s.metric.at(0, {y, 0.0}, z);
      const double uy = (U(i + 1, j) - U(i - 1, j)) / (2.0 * hy);
      const double uz = (U(i, j + 1) - U(i, j - 1)) / (2.0 * hz);
      const double uyy = (U(i + 1, j) - 2.0 * u + U(i - 1, j)) / (hy * hy);
      const double uzz = (U(i, j + 1) - 2.0 * u + U(i, j - 1)) / (hz * hz);
      const double uyz = (U(i + 1, j + 1) - U(i + 1, j - 1) - U(i - 1, j + 1) + U(i - 1, j - 1)) / (4.0 * hy * hz);
      // covariant Hessian of a^2 dy^2 + dz^2 in the orthonormal frame (dy / a, dz)
      const double Hyy = (uyy - (w.ay / w.a) * uy + w.a * w.az * uz) / (w.a * w.a);
      const double Hyz = (uyz - (w.az / w.a) * uy) / w.a;
      const double Hzz = uzz;
      const double g1 = uy / w.a, g2 = uz;
      const double gn = std::hypot(g1, g2);
      if (gn < 1e-8 / f.eps) fail(ErrorKind::DegenerateGradient, "vanishing gradient on the transition region");
      const double nu1 = g1 / gn, nu2 = g2 / gn;
      const double t1 = -nu2, t2 = nu1;
      // A = Hess (tau tau^T); |A|^2 = |Hess tau|^2 / |grad u|^2
      const double ht1 = Hyy * t1 + Hyz * t2, ht2 = Hyz * t1 + Hzz * t2;
      const double A2 = (ht1 * ht1 + ht2 * ht2) / (gn * gn);
      const double tht = t1 * ht1 + t2 * ht2;
      const double sff2 = tht * tht / (gn * gn);
      rep.values.push_back(std::sqrt(A2));
      rep.sup = std::max(rep.sup, std::sqrt(A2));
      rep.sff_sup = std::max(rep.sff_sup, std::sqrt(sff2));
      rep.dominance_defect = std::max(rep.dominance_defect, sff2 - A2);
      ++rep.samples;
    }
  }
  return rep;
}

}  // namespace aclab
