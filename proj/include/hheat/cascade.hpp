#ifndef HHEAT_CASCADE_HPP
#define HHEAT_CASCADE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hheat/grid.hpp"
#include "hheat/group.hpp"
#include "hheat/operators.hpp"
#include "hheat/stepper.hpp"

namespace hheat {

enum class Verdict { Converged, Blowup, Indeterminate };
std::string to_string(Verdict v);

struct CascadeThresholds {
  double tau_conv = 0.05;  // final probe ratio must be <= 1 + tau_conv, decreasing
  double tau_blow = 0.5;   // fitted d(log u)/d(log n) slope for a Blowup verdict
};

struct CascadeConfig {
  GridSpec grid;
  double c = 0.5;
  std::vector<double> schedule = {1, 3, 10, 30, 100, 300, 1000};  // truncation levels
  double T = 1.0;
  double dt = 1e-3;  // one uniform dt for the whole schedule (exact monotone coupling)
  double u0_radius = 0.75;
  double f_const = 0.0;  // source f = f_const * (unit-mass bump), truncated per level
  std::vector<GroupPoint> probes;
  std::optional<double> alpha_override;
  double localization_radius = std::numeric_limits<double>::infinity();
  PotentialSampling sampling = PotentialSampling::Center;  // cell-center values per the singular-node rule
  double avg_radius = 0.5;
  int subdiv = 5;
  std::vector<double> sample_times;  // defaults to 10 uniform times in (0, T]
  CascadeThresholds thresholds;
  double margin_hard_tol = 1e-8;  // normalized margin below -tol is a scheme bug
  SolverOptions solver{5e-14, 10000};
  bool keep_final_states = false;
};

struct CascadeRunRecord {
  double n = 0;
  bool reused = false;  // truncation no longer clips: identical to previous level
  std::vector<double> times;
  std::vector<std::vector<double>> probe_values;  // [time][probe]
  std::vector<double> weighted_mass;              // [time], origin cells excluded
  std::vector<double> sup_norm;                   // [time]
  std::vector<double> mass;                       // [time]
  // min over nodes and sample times of u_n - u_prev, raw and normalized by the
  // solution scale
  double margin_abs = std::numeric_limits<double>::quiet_NaN();
  double margin_norm = std::numeric_limits<double>::quiet_NaN();
};

struct CascadeEvidence {
  std::vector<double> final_probe;  // probe[0] at final time, per schedule entry
  std::vector<double> ratios;       // consecutive final-probe ratios
  double final_ratio = std::numeric_limits<double>::quiet_NaN();
  double loglog_slope = std::numeric_limits<double>::quiet_NaN();
  double growth = std::numeric_limits<double>::quiet_NaN();  // last / first
};

struct CascadeReport {
  int N = 1;
  double c = 0, Cstar = 1, alpha = 0;
  bool critical = false;
  Verdict verdict = Verdict::Indeterminate;
  std::string note;
  CascadeEvidence evidence;
  std::vector<CascadeRunRecord> runs;
  double u0_mass = 0;
  double u0_weighted_mass = 0;   // integral u0 phi, phi = d^-alpha
  double f_weighted_rate = 0;    // integral f phi (time-constant source)
  std::vector<GridField> final_states;  // per schedule entry, if requested
};

// Solve the truncated problems for every level of the schedule with identical
// initial data and source, verify pointwise monotonicity in the truncation
// level, and populate the report (including the classification verdict).
CascadeReport run_cascade(const CascadeConfig& cfg);

// Decision rule for the dichotomy; sets verdict, evidence and note on the
// report and returns the verdict. Requires >= 4 schedule entries spanning at
// least two decades.
Verdict classify(CascadeReport& report, const CascadeThresholds& thresholds);

struct WeightedMassMargin {
  double t = 0;
  double margin = 0;  // (u0 mass + source term) - weighted mass, worst over n
  double rhs = 0;     // the a-priori right-hand side at this time
};

// A-priori weighted-mass estimate: integral u_n(t) phi <= integral u0 phi +
// integral_0^t integral f phi, with origin-cell-excluded quadrature. Requires
// a subcritical configuration (alpha consistent with c).
std::vector<WeightedMassMargin> weighted_mass_margins(const CascadeReport& report, double alpha);

// min over the gauge ball of radius omega_radius (origin cells excluded) of
// u(w) d(w)^alpha; the universal lower-profile constant estimate.
double lower_profile_check(const GridField& field, double alpha, double omega_radius,
                           double eps_time);

// Runs the schedule with V_n and with V_n + B (B >= 0 bounded) and returns the
// max over nodes and sample times of v_n - e^{lambda t} u_n; nonpositive up to
// solver noise whenever lambda >= sup B.
double bounded_perturbation_compare(const CascadeConfig& cfg, const GridField& B, double lambda);

}  // namespace hheat

#endif  // HHEAT_CASCADE_HPP
