#ifndef HHEAT_STEPPER_HPP
#define HHEAT_STEPPER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "hheat/grid.hpp"
#include "hheat/operators.hpp"
#include "hheat/solver.hpp"

namespace hheat {

// One IMEX step of du/dt = A u + V u + f:
//   u <- (I - dt A)^{-1} [ e^{dt V} (u + dt f) ]
// Reaction and source are explicit with an exact exponential factor, diffusion
// is an implicit backward Euler solve. Both substeps preserve nonnegativity:
// the reaction factor is a positive multiplier and I - dt A is an M-matrix.
class HeatStepper {
 public:
  HeatStepper(const SparseOperator& A, double dt, const GridField& V, const GridField& f,
              SolverOptions solver = {});

  void step_inplace(GridField& u);
  // Diffusion substep only (reaction and source switched off).
  void diffuse_inplace(GridField& u);
  double dt() const { return dt_; }
  const SolveReport& last_solve() const { return last_; }

 private:
  void solve(std::vector<double>& rhs_then_solution);

  SparseOperator M_;  // I - dt A
  std::vector<double> exp_dtV_;
  std::vector<double> f_;
  double dt_;
  SolverOptions solver_;
  SolveReport last_;
  std::vector<double> work_;
};

struct EvolveOptions {
  double T = 1.0;
  double dt = 1e-3;
  std::vector<double> sample_times;        // defaults to 10 uniform times in (0, T]
  std::vector<std::int64_t> probe_nodes;   // flat node indices
  double weight_alpha = 0;                 // phi = d^-alpha for the weighted mass
  bool keep_snapshots = true;
  double reaction_cap = 1.0;               // require dt * sup V <= reaction_cap
  SolverOptions solver;
};

struct Trajectory {
  std::vector<double> times;                  // realized sample times
  std::vector<GridField> snapshots;           // at sample times, if kept
  std::vector<std::vector<double>> probes;    // [time][probe]
  std::vector<double> mass;                   // [time]
  std::vector<double> sup;                    // [time]
  std::vector<double> weighted_mass;          // [time], origin cells excluded
  GridField final_state;
  bool aborted = false;                       // NaN/overflow blowup diagnostic
  std::int64_t abort_step = -1;
};

Trajectory evolve(const SparseOperator& A, const GridField& u0, const GridField& V,
                  const GridField& f, const EvolveOptions& opts);

// Relative discrepancy of the stored state at time t against the integral form
//   u(t) = e^{tA} u0 + integral_0^t e^{(t-s)A} (V u(s) + f) ds
// evaluated with the same discrete diffusion propagator and trapezoid
// quadrature over s on `quad_nodes`+1 uniformly spaced snapshots.
double duhamel_residual(const SparseOperator& A, const GridField& u0, const GridField& V,
                        const GridField& f, const std::vector<GridField>& states_at_steps,
                        double dt, std::int64_t total_steps, int quad_nodes,
                        const SolverOptions& solver);

struct KernelFit {
  double t = 0;
  double slope = 0, intercept = 0, r2 = 0;
  double mass = 0;
  double min_value = 0;
  int spread_cells = 0;  // minimum over axes of the above-floor index range
};

// Evolves a discrete delta at the origin cell under the free flow and fits
// -log(u t^{Q/2}) against d^2(w)/t over nodes above floor_rel * max(u).
KernelFit heat_kernel_fit(const GridSpec& spec, const SparseOperator& A, double t, double dt,
                          double floor_rel = 1e-6, int min_spread_cells = 5,
                          SolverOptions solver = {});

// Lie-splitting ladder: for each m, the split product (e^{(delta/m)A} e^{(delta/m)V})^m u0
// with the diffusion factor realized by shared micro-steps of size
// delta / (micro_factor * max m); returns relative L2 distances to the finest
// split (m = micro_factor * max m). Distances decay at first order in 1/m.
std::vector<double> trotter_compare(const SparseOperator& A, const GridField& u0,
                                    const GridField& V, double delta,
                                    const std::vector<int>& m_ladder, int micro_factor = 4,
                                    SolverOptions solver = {});

}  // namespace hheat

#endif  // HHEAT_STEPPER_HPP
