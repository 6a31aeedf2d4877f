#include "hheat/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hheat {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Blowup: return "Blowup";
    default: return "Indeterminate";
  }
}

namespace {

std::vector<std::int64_t> resolve_probes(const GridSpec& spec,
                                         const std::vector<GroupPoint>& probes) {
  if (probes.empty()) throw std::invalid_argument("cascade: at least one probe required");
  std::vector<std::int64_t> nodes;
  for (const GroupPoint& p : probes) {
    const std::int64_t f = spec.nearest_node(p);
    if (spec.boundary_distance_cells(f) < 2)
      throw std::invalid_argument("cascade: probe within 2 cells of the boundary");
    nodes.push_back(f);
  }
  return nodes;
}

struct MarginScan {
  double abs_min = std::numeric_limits<double>::infinity();
  double norm_min = std::numeric_limits<double>::infinity();
  std::int64_t worst_cell = -1;
  double worst_time = 0;
};

MarginScan scan_margins(const std::vector<GridField>& prev, const std::vector<GridField>& cur) {
  MarginScan m;
  for (std::size_t s = 0; s < prev.size(); ++s) {
    double scale = 1.0;
    for (double v : prev[s].values) scale = std::max(scale, std::abs(v));
    for (double v : cur[s].values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < prev[s].values.size(); ++i) {
      const double d = cur[s].values[i] - prev[s].values[i];
      if (d < m.abs_min) {
        m.abs_min = d;
        m.worst_cell = std::int64_t(i);
        m.worst_time = cur[s].time_tag;
      }
      m.norm_min = std::min(m.norm_min, d / scale);
    }
  }
  return m;
}

double fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& ps) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ps[i] > 0)) return 0.0;  // zero or negative probes carry no growth
    const double lx = std::log(ns[i]), ly = std::log(ps[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double det = m * sxx - sx * sx;
  return det > 0 ? (m * sxy - sx * sy) / det : 0.0;
}

}  // namespace

CascadeReport run_cascade(const CascadeConfig& cfg) {
  cfg.grid.validate();
  if (cfg.schedule.empty()) throw std::invalid_argument("cascade: empty schedule");
  for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
    if (!(cfg.schedule[i] > cfg.schedule[i - 1]))
      throw std::invalid_argument("cascade: schedule must be strictly increasing");
  const double n_max = cfg.schedule.back();
  if (cfg.dt * n_max > 1.0 + 1e-12)
    throw std::invalid_argument("cascade: dt * n_max exceeds 1; reduce dt");

  const GroupParams gp(cfg.grid.N);
  CascadeReport rep;
  rep.N = gp.N;
  rep.c = cfg.c;
  rep.Cstar = gp.Cstar;
  rep.critical = std::abs(cfg.c - gp.Cstar) <= 1e-9 * std::max(1.0, gp.Cstar);
  rep.alpha = cfg.alpha_override
                  ? *cfg.alpha_override
                  : (cfg.c <= gp.Cstar ? smallest_root_alpha(cfg.c, gp.N) : double(gp.N));

  const auto probe_nodes = resolve_probes(cfg.grid, cfg.probes);
  const SparseOperator A = assemble_sublaplacian(cfg.grid);

  PotentialSpec pot;
  pot.c = cfg.c;
  pot.localization_radius = cfg.localization_radius;
  const GridField Vbase =
      sample_potential(cfg.grid, pot, cfg.sampling, cfg.avg_radius, cfg.subdiv);

  const GridField u0 = bump_initial_data(cfg.grid, cfg.u0_radius);
  GridField fbase(cfg.grid);
  if (cfg.f_const > 0) {
    fbase = u0;
    for (double& v : fbase.values) v *= cfg.f_const;
  }

  const GridField phi = gauge_weight_field(cfg.grid, rep.alpha);
  rep.u0_mass = u0.mass();
  rep.u0_weighted_mass = weighted_sum(u0, phi);
  rep.f_weighted_rate = weighted_sum(fbase, phi);

  EvolveOptions eopts;
  eopts.T = cfg.T;
  eopts.dt = cfg.dt;
  eopts.sample_times = cfg.sample_times;
  eopts.probe_nodes = probe_nodes;
  eopts.weight_alpha = rep.alpha;
  eopts.keep_snapshots = true;
  eopts.solver = cfg.solver;

  GridField Vn(cfg.grid), fn(cfg.grid), Vprev, fprev;
  std::vector<GridField> prev_snapshots;
  Trajectory prev_traj;

  for (std::size_t level = 0; level < cfg.schedule.size(); ++level) {
    const double n = cfg.schedule[level];
    for (std::size_t i = 0; i < Vn.values.size(); ++i) {
      Vn.values[i] = std::min(Vbase.values[i], n);
      fn.values[i] = std::min(fbase.values[i], n);
    }

    CascadeRunRecord run;
    run.n = n;
    const bool identical =
        level > 0 && Vn.values == Vprev.values && fn.values == fprev.values;

    if (identical) {
      // The truncation no longer clips anything new: the problem is the same,
      // so the run is reused verbatim and the margin is exactly zero.
      run = rep.runs.back();
      run.n = n;
      run.reused = true;
      run.margin_abs = 0;
      run.margin_norm = 0;
      rep.runs.push_back(std::move(run));
      if (cfg.keep_final_states) rep.final_states.push_back(rep.final_states.back());
      continue;
    }

    Trajectory traj = evolve(A, u0, Vn, fn, eopts);
    if (traj.aborted)
      throw std::runtime_error("cascade: run n=" + std::to_string(n) +
                               " overflowed at step " + std::to_string(traj.abort_step));
    run.times = traj.times;
    run.probe_values = traj.probes;
    run.weighted_mass = traj.weighted_mass;
    run.sup_norm = traj.sup;
    run.mass = traj.mass;

    if (level > 0) {
      const MarginScan m = scan_margins(prev_snapshots, traj.snapshots);
      run.margin_abs = m.abs_min;
      run.margin_norm = m.norm_min;
      if (m.norm_min < -cfg.margin_hard_tol) {
        std::ostringstream os;
        os << "cascade: monotonicity violation " << m.norm_min << " at cell " << m.worst_cell
           << ", t=" << m.worst_time << " between n=" << cfg.schedule[level - 1]
           << " and n=" << n << " (scheme bug, not physics)";
        throw std::runtime_error(os.str());
      }
    }

    prev_snapshots = std::move(traj.snapshots);
    if (cfg.keep_final_states) rep.final_states.push_back(traj.final_state);
    Vprev = Vn;
    fprev = fn;
    rep.runs.push_back(std::move(run));
  }

  classify(rep, cfg.thresholds);
  return rep;
}

Verdict classify(CascadeReport& report, const CascadeThresholds& thresholds) {
  const std::size_t K = report.runs.size();
  if (K < 4) throw std::invalid_argument("classify: need >= 4 schedule entries");
  if (!(report.runs.back().n / report.runs.front().n >= 100 * (1 - 1e-12)))
    throw std::invalid_argument("classify: schedule must span >= 2 decades");

  CascadeEvidence ev;
  std::vector<double> ns;
  for (const auto& run : report.runs) {
    ns.push_back(run.n);
    ev.final_probe.push_back(run.probe_values.back().at(0));
  }
  for (std::size_t i = 1; i < K; ++i) {
    const double a = ev.final_probe[i - 1], b = ev.final_probe[i];
    ev.ratios.push_back(a != 0 ? b / a : (b == 0 ? 1.0 : std::numeric_limits<double>::infinity()));
  }
  ev.final_ratio = ev.ratios.back();
  ev.loglog_slope = fit_loglog_slope(ns, ev.final_probe);
  ev.growth = (ev.final_probe.front() != 0) ? ev.final_probe.back() / ev.final_probe.front()
                                            : (ev.final_probe.back() == 0 ? 1.0 : INFINITY);

  const bool blowup = ev.loglog_slope >= thresholds.tau_blow;
  bool tail_decreasing = true;
  const std::size_t tail = std::min<std::size_t>(3, ev.ratios.size());
  for (std::size_t i = ev.ratios.size() - tail + 1; i < ev.ratios.size(); ++i)
    if (ev.ratios[i] > ev.ratios[i - 1] + 1e-9) tail_decreasing = false;
  const bool converged = ev.final_ratio <= 1.0 + thresholds.tau_conv && tail_decreasing;

  report.evidence = ev;
  if (blowup)
    report.verdict = Verdict::Blowup;
  else if (converged)
    report.verdict = Verdict::Converged;
  else {
    report.verdict = Verdict::Indeterminate;
    report.note = "indeterminate: extend the truncation schedule or refine the grid";
  }
  if (report.critical)
    report.note = "critical coefficient c = C*(N): verdict reported, not asserted";
  return report.verdict;
}

std::vector<WeightedMassMargin> weighted_mass_margins(const CascadeReport& report, double alpha) {
  const double c_of_alpha = alpha * (2 * report.N - alpha);
  if (std::abs(c_of_alpha - report.c) > 1e-10 * std::max(1.0, report.c))
    throw std::invalid_argument("weighted_mass_margins: alpha inconsistent with c");
  if (report.runs.empty()) return {};
  const auto& times = report.runs.front().times;
  std::vector<WeightedMassMargin> out;
  for (std::size_t s = 0; s < times.size(); ++s) {
    WeightedMassMargin m;
    m.t = times[s];
    m.rhs = report.u0_weighted_mass + report.f_weighted_rate * times[s];
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& run : report.runs) worst = std::min(worst, m.rhs - run.weighted_mass[s]);
    m.margin = worst;
    out.push_back(m);
  }
  return out;
}

double lower_profile_check(const GridField& field, double alpha, double omega_radius,
                           double eps_time) {
  if (field.time_tag < eps_time)
    throw std::invalid_argument("lower_profile_check: field earlier than eps_time");
  std::vector<char> excluded(field.values.size(), 0);
  for (std::int64_t f : origin_cells(field.spec)) excluded[std::size_t(f)] = 1;
  double cmin = std::numeric_limits<double>::infinity();
  for (std::int64_t f = 0; f < field.spec.size(); ++f) {
    if (excluded[std::size_t(f)]) continue;
    const double d = field.spec.node_gauge(f);
    if (d > omega_radius) continue;
    cmin = std::min(cmin, field.values[std::size_t(f)] * std::pow(d, alpha));
  }
  if (!std::isfinite(cmin))
    throw std::invalid_argument("lower_profile_check: no nodes inside omega_radius");
  return cmin;
}

double bounded_perturbation_compare(const CascadeConfig& cfg, const GridField& B, double lambda) {
  double bsup = 0;
  for (double v : B.values) {
    if (v < 0)
      throw std::invalid_argument("bounded_perturbation_compare: B must be >= 0 on the grid");
    bsup = std::max(bsup, v);
  }
  if (lambda < bsup - 1e-12)
    throw std::invalid_argument("bounded_perturbation_compare: need lambda >= sup B");

  const SparseOperator A = assemble_sublaplacian(cfg.grid);
  PotentialSpec pot;
  pot.c = cfg.c;
  pot.localization_radius = cfg.localization_radius;
  const GridField Vbase =
      sample_potential(cfg.grid, pot, cfg.sampling, cfg.avg_radius, cfg.subdiv);
  const GridField u0 = bump_initial_data(cfg.grid, cfg.u0_radius);
  GridField fbase(cfg.grid);
  if (cfg.f_const > 0) {
    fbase = u0;
    for (double& v : fbase.values) v *= cfg.f_const;
  }

  EvolveOptions eopts;
  eopts.T = cfg.T;
  eopts.dt = cfg.dt;
  eopts.sample_times = cfg.sample_times;
  eopts.probe_nodes = {cfg.grid.nearest_node(cfg.probes.empty() ? GroupPoint::origin(cfg.grid.N)
                                                                : cfg.probes.front())};
  eopts.keep_snapshots = true;
  eopts.solver = cfg.solver;

  double violation = -std::numeric_limits<double>::infinity();
  GridField Vn(cfg.grid), Vnb(cfg.grid), fn(cfg.grid);
  for (double n : cfg.schedule) {
    for (std::size_t i = 0; i < Vn.values.size(); ++i) {
      Vn.values[i] = std::min(Vbase.values[i], n);
      Vnb.values[i] = Vn.values[i] + B.values[i];
      fn.values[i] = std::min(fbase.values[i], n);
    }
    // the perturbed reaction needs headroom for dt * sup(V_n + B)
    EvolveOptions ep = eopts;
    ep.reaction_cap = 1.0 + cfg.dt * bsup;
    const Trajectory base = evolve(A, u0, Vn, fn, eopts);
    const Trajectory pert = evolve(A, u0, Vnb, fn, ep);
    for (std::size_t s = 0; s < base.snapshots.size(); ++s) {
      const double growth = std::exp(lambda * base.snapshots[s].time_tag);
      for (std::size_t i = 0; i < base.snapshots[s].values.size(); ++i)
        violation = std::max(violation, pert.snapshots[s].values[i] -
                                            growth * base.snapshots[s].values[i]);
    }
  }
  return violation;
}

}  // namespace hheat
