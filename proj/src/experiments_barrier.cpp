#include <chrono>
#include <cmath>
#include <cstdio>

#include "aclab/barrier.hpp"
#include "aclab/error.hpp"
#include "aclab/field.hpp"
#include "aclab/harness.hpp"
#include "aclab/io.hpp"
#include "aclab/layers.hpp"
#include "aclab/potential.hpp"
#include "aclab/toda.hpp"

namespace aclab {

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

nlohmann::json trace_json(const BarrierResult& r, double eps, double mu) {
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& it : r.trace)
    tr.push_back({{"k", it.k},
                  {"update", it.update},
                  {"factor", it.factor},
                  {"residual", it.residual},
                  {"flat_norm", it.flat_norm},
                  {"sharp_norm", it.sharp_norm},
                  {"zeta_norm", it.zeta_norm}});
  return {{"eps", eps},
          {"mu", mu},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"contraction", r.contraction},
          {"contraction_max", r.contraction_max},
          {"residual", r.residual},
          {"original_residual", r.original_residual},
          {"boundary_mismatch", r.boundary_mismatch},
          {"projection", r.projection},
          {"strip_constant", r.strip_constant},
          {"flat_norm", r.flat_norm},
          {"sharp_norm", r.sharp_norm},
          {"zeta_norm", r.zeta_norm},
          {"trace", tr}};
}

BarrierContextPtr context_for(const ExperimentRun& run, double eps) {
  const double ds = run.number("delta_star", 0.1);
  const double alpha = run.number("alpha", 0.125);
  const FieldGrid g = barrier_grid(eps, ds);
  const WellPtr well = share_well(well_from_id(run.string("well", "standard")));
  return make_barrier_context(g, metric_from_id(run.string("metric", "flat"), g.base), well, eps, ds, alpha);
}

void barrier_fixed_point(ExperimentRun& run) {
  const auto t0 = Clock::now();
  const auto eps = run.eps_list({0.1, 0.05});
  const double mu_max = run.number("mu_max", 0.05);
  const int members = 5;
  CsvTable fam{{"epsilon", "mu", "iterations", "contraction", "contraction_max", "residual", "original_residual",
                "boundary_mismatch", "projection", "strip_constant"},
               {}};
  CsvTable lip{{"epsilon", "pair", "data_distance", "state_distance", "lipschitz"}, {}};
  std::vector<double> q_eps;
  nlohmann::json per = nlohmann::json::array();
  for (double e : eps) {
    const BarrierContextPtr c = context_for(run, e);
    std::vector<BoundaryData> data;
    std::vector<BarrierResult> res;
    double q = 0.0, resid = 0.0, mism = 0.0, proj = 0.0;
    bool conv = true;
    for (int k = 0; k < members; ++k) {
      const double mu = mu_max * k / (members - 1);
      data.push_back(family_data(*c, mu));
      res.push_back(fixed_point_solve(c, data.back(), run.number("tol", 1e-9), 80));
      const BarrierResult& r = res.back();
      write_json(run.artifact("trace_eps" + tag(e) + "_mu" + std::to_string(k) + ".json"), trace_json(r, e, mu));
      fam.add({e, mu, static_cast<double>(r.iterations), r.contraction, r.contraction_max, r.residual,
               r.original_residual, r.boundary_mismatch, r.projection, r.strip_constant});
      q = std::max(q, r.contraction);
      resid = std::max(resid, r.residual);
      mism = std::max(mism, r.boundary_mismatch);
      proj = std::max(proj, r.projection);
      conv = conv && r.converged;
    }
    save_checkpoint(run.artifact("u_eps" + tag(e) + ".bin"), res.back().u);
    double lo = 1e300, hi = 0.0;
    for (int k = 0; k + 1 < members; ++k) {
      const double dd = data_norm(*c, difference(data[k + 1], data[k]));
      const double sd = state_norm(*c, difference(res[k + 1].state, res[k].state));
      const double L = sd / dd;
      lip.add({e, static_cast<double>(k), dd, sd, L});
      lo = std::min(lo, L);
      hi = std::max(hi, L);
    }
    q_eps.push_back(q);
    per.push_back({{"eps", e}, {"contraction", q}, {"residual", resid}, {"lipschitz_min", lo},
                   {"lipschitz_max", hi}, {"jacobi_gap", c->jacobi_gap}});
    const std::string at = " at eps " + tag(e);
    run.check("all family members converged" + at, conv, conv ? 1.0 : 0.0, 1.0);
    run.check("contraction factor < 1" + at, q < 1.0, q, 1.0);
    run.check("PDE residual" + at, resid <= 1e-8, resid, 1e-8);
    run.check("boundary data matched at nodes" + at, mism == 0.0, mism, 0.0);
    run.check("Pi v_sharp = 0" + at, proj <= 1e-10, proj, 1e-10);
    run.check("Lipschitz constant finite and stable (max/min)" + at, std::isfinite(hi) && lo > 0.0 && hi / lo <= 2.0,
              hi / lo, 2.0);
  }
  for (size_t k = 1; k < q_eps.size(); ++k)
    run.check("contraction decreases with eps (" + tag(eps[k - 1]) + " -> " + tag(eps[k]) + ")",
              q_eps[k] < q_eps[k - 1], q_eps[k], q_eps[k - 1]);
  write_csv(run.artifact("family.csv"), fam);
  write_csv(run.artifact("lipschitz.csv"), lip);
  const double secs = since(t0);
  run.metrics() = {{"per_eps", per}, {"mu_max", mu_max}, {"seconds", secs}};
  run.check("runtime", secs < 300.0, secs, 300.0);
}

// Negated Dirichlet two-layer solution over the barrier base: +1 outside the sheets, -1 between them.
PhaseField sliding_target(const FieldGrid& bg, const WarpedMetric& m, WellPtr well, double eps) {
  const double zh = 1.6;
  const int nz = 2 * static_cast<int>(std::ceil(2.0 * zh / (eps / 8.0)) / 2) + 1;
  const FieldGrid ug = make_field_grid(bg.base, -zh, zh, nz);
  const int n = bg.base.n[0];
  const double D = boundary_gap(eps, 0.05);
  const auto prof = layer_profile(well);
  TodaConfig tc = make_toda(bg.base, m, eps, {Eigen::VectorXd::Constant(n, -D / 2), Eigen::VectorXd::Constant(n, D / 2)},
                            prof->A0, prof->h0);
  tc = solve_equilibrium(tc, 1e-12);
  const Eigen::VectorXd mid = 0.5 * (tc.sheets[0] + tc.sheets[1]);
  for (auto& s : tc.sheets) s -= mid;
  const SetupPtr setup = make_setup(ug, m, well);
  const auto trunc = layer_truncation(well, eps);
  PhaseField u0 = superpose(setup, *trunc, eps, tc.sheets, {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)});
  u0.u = -u0.u;
  NewtonReport nr;
  PhaseField u = newton_solve(u0, 1e-10, 40, &nr);
  if (!nr.converged) fail(ErrorKind::NumericFailure, "two-layer solve for the sliding target failed");
  return u;
}

void barrier_sliding(ExperimentRun& run) {
  const auto t0 = Clock::now();
  const auto eps = run.eps_list({0.1, 0.05});
  const double B_floor = run.number("B_floor", 1.0);
  CsvTable t{{"epsilon", "B_measured", "B", "leaf", "delta", "t_star", "bound", "contact_on_boundary"}, {}};
  for (double e : eps) {
    const BarrierContextPtr c = context_for(run, e);
    const PhaseField u = sliding_target(c->grid, c->metric, c->well, e);
    const LayerStack st = nodal_layers(u);
    if (st.Q != 2) fail(ErrorKind::Topology, "sliding target must have two sheets");
    const int n = c->grid.ny();
    const double leaf = 0.5 * (st.f[1][0] + st.f[1][n - 1]);
    const double Bm = decay_constant(u);
    const double B = std::max(Bm, B_floor);
    const BarrierResult b = fixed_point_solve(c, sliding_data(*c, B));
    // room for the shifted slab inside the solution box
    const double delta = 0.5 * (u.grid().z_hi - c->grid.z_hi - 0.01 - leaf);
    const SlidingReport sr = sliding(b, u, leaf, delta, B, Bm);
    t.add({e, Bm, B, leaf, delta, sr.t_star, sr.bound, sr.contact.argmin_on_boundary ? 1.0 : 0.0});
    const std::string at = " at eps " + tag(e);
    run.check("barrier converged" + at, b.converged && b.residual <= 1e-8, b.residual, 1e-8);
    run.check("ordered at the top of the foliation" + at, sr.start_ordered, sr.start_ordered, 1.0);
    run.check("first contact t* >= 0" + at, sr.t_star >= 0.0, sr.t_star, 0.0);
    run.check("first contact t* <= 7 B eps|log eps|" + at, sr.t_star <= sr.bound, sr.t_star, sr.bound);
  }
  write_csv(run.artifact("sliding.csv"), t);
  run.metrics() = {{"seconds", since(t0)}};
}

}  // namespace

void register_barrier(std::vector<Experiment>& out) {
  out.push_back({"barrier-fixed-point", "Dirichlet-data barrier: contraction, residual, Lipschitz data map", 10,
                 barrier_fixed_point});
  out.push_back({"barrier-sliding", "slides the barrier down to first contact with a two-layer solution", 0,
                 barrier_sliding});
}

}  // namespace aclab
