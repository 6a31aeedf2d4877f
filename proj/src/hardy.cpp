#include "hheat/hardy.hpp"

#include <cmath>
#include <stdexcept>

namespace hheat {

double rayleigh_quotient(const SparseOperator& S, const std::vector<double>& mass,
                         const std::vector<double>& u) {
  std::vector<double> su;
  S.multiply(u, su);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += u[i] * su[i];
    den += mass[i] * u[i] * u[i];
  }
  if (den <= 0) throw std::invalid_argument("rayleigh_quotient: potential mass vanishes");
  return num / den;
}

std::vector<double> hardy_mass_vector(const GridSpec& spec, const HardyOptions& opts) {
  PotentialSpec pot;
  pot.c = 1.0;  // quotient against V*_1
  const GridField V = sample_potential(spec, pot, opts.sampling, opts.avg_radius, opts.subdiv);
  return V.values;
}

std::vector<HardyLevel> estimate_hardy_constant(int N, double z_halfwidth, double l_halfwidth,
                                                const std::vector<int>& levels,
                                                const HardyOptions& opts) {
  if (levels.empty()) throw std::invalid_argument("estimate_hardy_constant: no levels");
  std::vector<HardyLevel> out;
  for (int cells : levels) {
    const GridSpec spec = GridSpec::box(N, z_halfwidth, l_halfwidth, cells, cells);
    const SparseOperator S = assemble_horizontal_stiffness(spec);
    const std::vector<double> m = hardy_mass_vector(spec, opts);

    // positive seed concentrated where the potential lives
    GridField seed = bump_initial_data(spec, std::min(1.0, 0.5 * z_halfwidth));
    std::vector<double> u = seed.values;

    HardyLevel lvl;
    lvl.cells = cells;
    double q_prev = rayleigh_quotient(S, m, u);
    std::vector<double> b(u.size()), x = u;
    for (int it = 1; it <= opts.max_power_iterations; ++it) {
      for (std::size_t i = 0; i < u.size(); ++i) b[i] = m[i] * u[i];
      const SolveReport rep = conjugate_gradient(S, b, x, opts.cg);
      if (!rep.converged)
        throw std::runtime_error("estimate_hardy_constant: stiffness solve failed, residual " +
                                 std::to_string(rep.residual));
      double nrm = 0;
      for (double v : x) nrm = std::max(nrm, std::abs(v));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] /= nrm;
      u = x;
      const double q = rayleigh_quotient(S, m, u);
      lvl.power_iterations = it;
      lvl.estimate = q;
      if (std::abs(q - q_prev) <= opts.tol * std::abs(q)) {
        lvl.converged = true;
        break;
      }
      q_prev = q;
    }
    if (!lvl.converged) lvl.estimate = q_prev;  // soft error: carry the last iterate
    out.push_back(lvl);
  }
  return out;
}

}  // namespace hheat
