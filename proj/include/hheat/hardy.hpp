#ifndef HHEAT_HARDY_HPP
#define HHEAT_HARDY_HPP

#include <vector>

#include "hheat/grid.hpp"
#include "hheat/operators.hpp"
#include "hheat/solver.hpp"

namespace hheat {

struct HardyOptions {
  PotentialSampling sampling = PotentialSampling::CellAverage;
  double avg_radius = 0.5;
  int subdiv = 5;
  int max_power_iterations = 400;
  double tol = 1e-9;  // relative change of the quotient between iterations
  SolverOptions cg{1e-8, 50000};
};

struct HardyLevel {
  int cells = 0;
  double estimate = 0;  // minimum Rayleigh quotient at this refinement
  int power_iterations = 0;
  bool converged = false;  // soft failure keeps the last iterate
};

// (u, S u) / (u, m u) for the horizontal stiffness S and mass vector m.
double rayleigh_quotient(const SparseOperator& S, const std::vector<double>& mass,
                         const std::vector<double>& u);

// Minimum of the Rayleigh quotient  sum |∇_H u|^2 / sum V*_1 u^2  over grid
// functions vanishing outside the box, by inverse power iteration on the
// pencil (stiffness, potential-weighted mass), per refinement level. The
// sequence decreases toward the critical constant N^2 from above.
std::vector<HardyLevel> estimate_hardy_constant(int N, double z_halfwidth, double l_halfwidth,
                                                const std::vector<int>& levels,
                                                const HardyOptions& opts = {});

// Potential-weighted mass vector for one grid (volume factor omitted; it
// cancels against the volume-free stiffness in the quotient).
std::vector<double> hardy_mass_vector(const GridSpec& spec, const HardyOptions& opts);

}  // namespace hheat

#endif  // HHEAT_HARDY_HPP
