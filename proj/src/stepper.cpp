#include "hheat/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace hheat {

HeatStepper::HeatStepper(const SparseOperator& A, double dt, const GridField& V,
                         const GridField& f, SolverOptions solver)
    : M_(shifted_identity_minus(A, dt)), dt_(dt), solver_(solver) {
  if (!(dt > 0)) throw std::invalid_argument("HeatStepper: dt > 0");
  exp_dtV_.resize(V.values.size());
  for (std::size_t i = 0; i < V.values.size(); ++i) {
    if (V.values[i] < 0) throw std::invalid_argument("HeatStepper: V must be >= 0");
    exp_dtV_[i] = std::exp(dt * V.values[i]);
  }
  f_ = f.values;
  for (double v : f_)
    if (v < 0) throw std::invalid_argument("HeatStepper: f must be >= 0");
}

void HeatStepper::solve(std::vector<double>& rhs) {
  // warm start from the right-hand side itself, which is O(dt) from the answer
  work_ = rhs;
  last_ = bicgstab(M_, rhs, work_, solver_);
  if (!last_.converged)
    throw std::runtime_error("HeatStepper: diffusion solve failed, residual " +
                             std::to_string(last_.residual) + " after " +
                             std::to_string(last_.iterations) + " iterations");
  rhs.swap(work_);
}

void HeatStepper::step_inplace(GridField& u) {
  auto& v = u.values;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = exp_dtV_[i] * (v[i] + dt_ * f_[i]);
  solve(v);
  u.time_tag += dt_;
}

void HeatStepper::diffuse_inplace(GridField& u) {
  solve(u.values);
  u.time_tag += dt_;
}

Trajectory evolve(const SparseOperator& A, const GridField& u0, const GridField& V,
                  const GridField& f, const EvolveOptions& opts) {
  if (!(opts.dt > 0) || !(opts.T > 0)) throw std::invalid_argument("evolve: need dt, T > 0");
  double vmax = 0;
  for (double v : V.values) vmax = std::max(vmax, v);
  if (opts.dt * vmax > opts.reaction_cap * (1 + 1e-12))
    throw std::invalid_argument("evolve: dt * sup V exceeds the reaction cap");

  const std::int64_t steps = std::llround(opts.T / opts.dt);
  if (steps < 1) throw std::invalid_argument("evolve: T shorter than one step");

  std::vector<double> sample_times = opts.sample_times;
  if (sample_times.empty())
    for (int k = 1; k <= 10; ++k) sample_times.push_back(opts.T * k / 10.0);
  std::set<std::int64_t> sample_steps;
  for (double t : sample_times) {
    std::int64_t k = std::llround(t / opts.dt);
    sample_steps.insert(std::min(std::max<std::int64_t>(k, 1), steps));
  }

  const GridField phi = gauge_weight_field(u0.spec, opts.weight_alpha);

  Trajectory traj;
  GridField u = u0;
  u.time_tag = 0;
  HeatStepper stepper(A, opts.dt, V, f, opts.solver);

  auto record = [&](const GridField& state) {
    traj.times.push_back(state.time_tag);
    std::vector<double> pv;
    for (std::int64_t p : opts.probe_nodes) pv.push_back(state.values[p]);
    traj.probes.push_back(std::move(pv));
    traj.mass.push_back(state.mass());
    traj.sup.push_back(state.sup_norm());
    traj.weighted_mass.push_back(weighted_sum(state, phi));
    if (opts.keep_snapshots) traj.snapshots.push_back(state);
  };

  for (std::int64_t k = 1; k <= steps; ++k) {
    stepper.step_inplace(u);
    if (!u.all_finite() || u.sup_norm() > 1e300) {
      traj.aborted = true;  // overflow is a blowup diagnostic, not a failure
      traj.abort_step = k;
      break;
    }
    if (sample_steps.count(k)) record(u);
  }
  traj.final_state = std::move(u);
  return traj;
}

double duhamel_residual(const SparseOperator& A, const GridField& u0, const GridField& V,
                        const GridField& f, const std::vector<GridField>& states_at_steps,
                        double dt, std::int64_t total_steps, int quad_nodes,
                        const SolverOptions& solver) {
  if (quad_nodes < 1) throw std::invalid_argument("duhamel_residual: quad_nodes >= 1");
  if (std::int64_t(states_at_steps.size()) != total_steps + 1)
    throw std::invalid_argument("duhamel_residual: need a state at every step, 0..K");
  if (total_steps % quad_nodes != 0)
    throw std::invalid_argument("duhamel_residual: quad_nodes must divide the step count");

  const std::int64_t stride = total_steps / quad_nodes;
  const double ds = dt * stride;
  GridField zero(u0.spec);
  HeatStepper free_flow(A, dt, zero, zero, solver);

  // Ascending Horner accumulation: after processing node k_j, `acc` holds
  // sum_{i<=j} w_i P^{k_j - k_i} (V u(s_i) + f), plus the propagated u0 term.
  GridField acc = u0;
  const std::size_t n = u0.values.size();
  for (int j = 0; j <= quad_nodes; ++j) {
    const std::int64_t k = j * stride;
    const double w = ds * ((j == 0 || j == quad_nodes) ? 0.5 : 1.0);
    const GridField& us = states_at_steps[std::size_t(k)];
    for (std::size_t i = 0; i < n; ++i)
      acc.values[i] += w * (V.values[i] * us.values[i] + f.values[i]);
    if (j < quad_nodes)
      for (std::int64_t s = 0; s < stride; ++s) free_flow.diffuse_inplace(acc);
  }

  const GridField& ut = states_at_steps.back();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ut.values[i] - acc.values[i];
    num += d * d;
    den += ut.values[i] * ut.values[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

KernelFit heat_kernel_fit(const GridSpec& spec, const SparseOperator& A, double t, double dt,
                          double floor_rel, int min_spread_cells, SolverOptions solver) {
  const std::int64_t steps = std::llround(t / dt);
  if (steps < 1) throw std::invalid_argument("heat_kernel_fit: t shorter than one step");
  GridField u = delta_initial_data(spec);
  GridField zero(spec);
  HeatStepper stepper(A, dt, zero, zero, solver);
  for (std::int64_t k = 0; k < steps; ++k) stepper.diffuse_inplace(u);

  KernelFit fit;
  fit.t = t;
  fit.mass = u.mass();
  fit.min_value = u.min_value();
  if (fit.min_value < -1e-12)
    throw std::runtime_error("heat_kernel_fit: negative kernel value " +
                             std::to_string(fit.min_value) + "; scheme monotonicity failure");

  const double umax = u.sup_norm();
  const double floor = floor_rel * umax;

  // spread of the above-floor region, per axis
  std::vector<std::vector<char>> seen(spec.dim());
  for (int a = 0; a < spec.dim(); ++a) seen[a].assign(spec.cells[a], 0);
  for (std::int64_t fidx = 0; fidx < spec.size(); ++fidx) {
    if (u.values[fidx] < floor) continue;
    auto idx = spec.unflatten(fidx);
    for (int a = 0; a < spec.dim(); ++a) seen[a][idx[a]] = 1;
  }
  fit.spread_cells = spec.cells[0];
  for (int a = 0; a < spec.dim(); ++a) {
    int lo = spec.cells[a], hi = -1;
    for (int i = 0; i < spec.cells[a]; ++i)
      if (seen[a][i]) {
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
    fit.spread_cells = std::min(fit.spread_cells, hi - lo + 1);
  }
  if (fit.spread_cells < min_spread_cells)
    throw std::invalid_argument("heat_kernel_fit: delta has spread over only " +
                                std::to_string(fit.spread_cells) +
                                " cells; t below the spread threshold");

  // least squares of y = -log(u t^{Q/2}) against x = d^2/t
  const GroupParams gp(spec.N);
  const double tq = std::pow(t, 0.5 * gp.Q);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::int64_t m = 0;
  for (std::int64_t fidx = 0; fidx < spec.size(); ++fidx) {
    if (u.values[fidx] < floor || u.values[fidx] <= 0) continue;
    const double d = spec.node_gauge(fidx);
    const double x = d * d / t;
    const double y = -std::log(u.values[fidx] * tq);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  if (m < 8) throw std::invalid_argument("heat_kernel_fit: too few nodes above floor");
  const double det = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / m;
  const double ss_res = syy - sy * sy / m - fit.slope * (sxy - sx * sy / m);
  const double ss_tot = syy - sy * sy / m;
  fit.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<double> trotter_compare(const SparseOperator& A, const GridField& u0,
                                    const GridField& V, double delta,
                                    const std::vector<int>& m_ladder, int micro_factor,
                                    SolverOptions solver) {
  if (m_ladder.empty()) throw std::invalid_argument("trotter_compare: empty ladder");
  int m_max = 0;
  for (int m : m_ladder) m_max = std::max(m_max, m);
  const int m_fine = micro_factor * m_max;
  for (int m : m_ladder)
    if (m < 1 || m_fine % m != 0)
      throw std::invalid_argument("trotter_compare: every m must divide micro_factor * max m");

  const double dt_micro = delta / m_fine;
  GridField zero(u0.spec);
  HeatStepper micro(A, dt_micro, zero, zero, solver);
  const std::size_t n = u0.values.size();

  auto split_product = [&](int m) {
    GridField u = u0;
    const double tau = delta / m;
    std::vector<double> factor(n);
    for (std::size_t i = 0; i < n; ++i) factor[i] = std::exp(tau * V.values[i]);
    for (int s = 0; s < m; ++s) {
      for (std::size_t i = 0; i < n; ++i) u.values[i] *= factor[i];
      for (int k = 0; k < m_fine / m; ++k) micro.diffuse_inplace(u);
    }
    return u;
  };

  const GridField ref = split_product(m_fine);
  double ref_norm = 0;
  for (double v : ref.values) ref_norm += v * v;
  ref_norm = std::sqrt(ref_norm);

  std::vector<double> dist;
  for (int m : m_ladder) {
    const GridField um = split_product(m);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = um.values[i] - ref.values[i];
      d2 += d * d;
    }
    dist.push_back(ref_norm > 0 ? std::sqrt(d2) / ref_norm : std::sqrt(d2));
  }
  return dist;
}

}  // namespace hheat
