#include <doctest.h>

#include <cmath>
#include <random>

#include "hheat/cascade.hpp"
#include "hheat/hardy.hpp"
#include "hheat/quadrature.hpp"
#include "hheat/radial.hpp"

using namespace hheat;

namespace {

CascadeConfig small_config(double c, int cells = 12) {
  CascadeConfig cfg;
  cfg.grid = GridSpec::box(1, 2.0, 4.0, cells, cells);
  cfg.c = c;
  cfg.schedule = {1, 10, 100, 1000};
  cfg.T = 0.25;
  cfg.dt = 1e-3;
  cfg.probes = {GroupPoint::from_xyl({0.3}, {0.3}, 0.2), GroupPoint::from_xyl({0.9}, {0.1}, 0.5)};
  cfg.sample_times = {0.05, 0.1, 0.15, 0.2, 0.25};
  cfg.solver = {1e-13, 10000};
  return cfg;
}

}  // namespace

TEST_CASE("smooth radial test functions obey the Hardy inequality") {
  // direct quadrature of both integrals via the radial reduction; the quotient
  // of any admissible profile sits at or above N^2
  for (int N : {1, 2}) {
    auto k = RadialProfile::sample(
        [](double s) { return s * s * std::exp(-3 * s) * (2.0 - s) * (2.0 - s); }, 0.0, 2.0, 2000,
        0.0);
    const double grad = radial_gradient_constant(N) *
                        gl_integrate(
                            [&](double s) {
                              const double kp = k.derivative(s);
                              return kp * kp * std::pow(s, 2 * N + 1);
                            },
                            1e-6, 2.0, 256, 1.05);
    const double mass = radial_gradient_constant(N) *
                        gl_integrate(
                            [&](double s) {
                              const double kv = k.value(s);
                              return kv * kv * std::pow(s, 2 * N - 1);
                            },
                            1e-6, 2.0, 256, 1.05);
    CHECK(grad / mass >= double(N) * N - 1e-6);
  }
}

TEST_CASE("hardy estimate decreases under refinement and is a true minimum") {
  HardyOptions opts;
  opts.max_power_iterations = 200;
  opts.cg.tol = 1e-9;
  const auto levels = estimate_hardy_constant(1, 2.0, 4.0, {12, 16, 20}, opts);
  REQUIRE(levels.size() == 3);
  for (const auto& lvl : levels) {
    CHECK(lvl.converged);
    CHECK(lvl.estimate > 0.5);
  }
  CHECK(levels[1].estimate <= levels[0].estimate + 1e-9);
  CHECK(levels[2].estimate <= levels[1].estimate + 1e-9);

  // any admissible grid function sits at or above the reported minimum
  const GridSpec spec = GridSpec::box(1, 2.0, 4.0, 20, 20);
  const SparseOperator S = assemble_horizontal_stiffness(spec);
  const auto m = hardy_mass_vector(spec, opts);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> u(S.n);
  for (int trial = 0; trial < 5; ++trial) {
    for (double& v : u) v = uni(rng);
    CHECK(rayleigh_quotient(S, m, u) >= levels[2].estimate * (1 - 1e-9));
  }
}

TEST_CASE("cascade with c = 0 reuses every level and converges") {
  CascadeConfig cfg = small_config(0.0);
  const CascadeReport rep = run_cascade(cfg);
  CHECK(rep.verdict == Verdict::Converged);
  for (std::size_t i = 1; i < rep.runs.size(); ++i) {
    CHECK(rep.runs[i].reused);  // zero potential clips nothing at any level
    CHECK(rep.runs[i].margin_abs == 0);
  }
  for (double r : rep.evidence.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("subcritical cascade converges with tight monotonicity margins") {
  CascadeConfig cfg = small_config(0.5);
  const CascadeReport rep = run_cascade(cfg);
  CHECK(rep.alpha == doctest::Approx(smallest_root_alpha(0.5, 1)));
  CHECK(rep.verdict == Verdict::Converged);
  CHECK(rep.evidence.final_ratio <= 1.05);
  for (const auto& run : rep.runs)
    if (std::isfinite(run.margin_norm)) CHECK(run.margin_norm >= -1e-12);
}

TEST_CASE("solutions increase pointwise in c and verdicts are ordered") {
  CascadeConfig lo = small_config(0.4);
  CascadeConfig hi = small_config(0.9);
  lo.keep_final_states = hi.keep_final_states = true;
  const CascadeReport rlo = run_cascade(lo);
  const CascadeReport rhi = run_cascade(hi);
  for (std::size_t lvl = 0; lvl < rlo.final_states.size(); ++lvl)
    for (std::size_t i = 0; i < rlo.final_states[lvl].values.size(); ++i)
      CHECK(rhi.final_states[lvl].values[i] >= rlo.final_states[lvl].values[i] - 1e-10);
  // no Blowup at the lower c with Converged at the higher c
  const bool bad = rlo.verdict == Verdict::Blowup && rhi.verdict == Verdict::Converged;
  CHECK(!bad);
}

TEST_CASE("critical coefficient is flagged, never asserted") {
  CascadeConfig cfg = small_config(1.0);
  const CascadeReport rep = run_cascade(cfg);
  CHECK(rep.critical);
  CHECK(rep.note.find("critical") != std::string::npos);
}

TEST_CASE("classifier decision rule") {
  CascadeReport rep;
  rep.N = 1;
  rep.c = 0.5;
  auto push = [&](double n, double probe) {
    CascadeRunRecord r;
    r.n = n;
    r.times = {1.0};
    r.probe_values = {{probe}};
    r.weighted_mass = {0};
    r.sup_norm = {probe};
    r.mass = {probe};
    rep.runs.push_back(r);
  };

  // constant probe series -> Converged
  for (double n : {1.0, 10.0, 100.0, 1000.0}) push(n, 2.5);
  CHECK(classify(rep, {}) == Verdict::Converged);

  // geometric growth per decade -> Blowup
  rep.runs.clear();
  double p = 1;
  for (double n : {1.0, 10.0, 100.0, 1000.0}) {
    push(n, p);
    p *= 8;
  }
  CHECK(classify(rep, {}) == Verdict::Blowup);
  CHECK(rep.evidence.loglog_slope >= 0.5);

  // too-short schedules are rejected
  rep.runs.resize(3);
  CHECK_THROWS_AS(classify(rep, {}), std::invalid_argument);
}

TEST_CASE("weighted mass a-priori estimate on a small subcritical cascade") {
  CascadeConfig cfg = small_config(0.75, 24);
  cfg.T = 1.0;
  cfg.sample_times = {0.1, 0.25, 0.5, 0.75, 1.0};
  const CascadeReport rep = run_cascade(cfg);
  const auto margins = weighted_mass_margins(rep, rep.alpha);
  REQUIRE(!margins.empty());
  for (const auto& m : margins) {
    CHECK(m.rhs > 0);
    CHECK(m.margin >= -0.05 * m.rhs);
  }
  CHECK_THROWS_AS(weighted_mass_margins(rep, 0.9), std::invalid_argument);
}

TEST_CASE("lower profile constant") {
  const GridSpec spec = GridSpec::box(1, 2.0, 4.0, 16, 16);
  GridField exact(spec, 0.0, 1.0);
  for (std::int64_t i = 0; i < spec.size(); ++i)
    exact.values[i] = std::pow(spec.node_gauge(i), -0.5);
  CHECK(lower_profile_check(exact, 0.5, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

  GridField null(spec, 0.0, 1.0);
  CHECK(lower_profile_check(null, 0.5, 1.0, 0.5) == 0.0);
  CHECK_THROWS_AS(lower_profile_check(null, 0.5, 1.0, 2.0), std::invalid_argument);

  // a genuine cascade state has a strictly positive, refinement-stable constant
  CascadeConfig c12 = small_config(0.75, 12);
  CascadeConfig c16 = small_config(0.75, 16);
  c12.keep_final_states = c16.keep_final_states = true;
  const CascadeReport r12 = run_cascade(c12);
  const CascadeReport r16 = run_cascade(c16);
  const double est12 = lower_profile_check(r12.final_states.back(), r12.alpha, 1.0, 0.2);
  const double est16 = lower_profile_check(r16.final_states.back(), r16.alpha, 1.0, 0.2);
  CHECK(est12 > 0);
  CHECK(est16 > 0);
  CHECK(est16 <= 2 * est12);
  CHECK(est16 >= 0.5 * est12);
}

TEST_CASE("bounded perturbation domination") {
  CascadeConfig cfg = small_config(0.5);
  cfg.schedule = {1, 10, 100, 1000};
  const GridSpec& spec = cfg.grid;

  // B = 0: exact equality
  CHECK(bounded_perturbation_compare(cfg, GridField(spec), 0.0) <= 1e-12);

  // constant B: commuting factor, violation at solver noise with lambda = b
  CHECK(bounded_perturbation_compare(cfg, GridField(spec, 0.8), 0.8) <= 1e-10);

  // random bounded B with lambda = sup B
  std::mt19937_64 rng(23);
  GridField B(spec);
  std::uniform_real_distribution<double> uni(0.0, 0.6);
  double bsup = 0;
  for (double& v : B.values) {
    v = uni(rng);
    bsup = std::max(bsup, v);
  }
  CHECK(bounded_perturbation_compare(cfg, B, bsup) <= 1e-10);

  CHECK_THROWS_AS(bounded_perturbation_compare(cfg, B, 0.5 * bsup), std::invalid_argument);
}
