// Command-line laboratory for heat flow with Hardy-type potentials on the
// Heisenberg group: identity verification, Hardy-constant estimation, heat
// kernel fits, and the truncated-potential cascade.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "hheat/hardy.hpp"
#include "hheat/io.hpp"
#include "hheat/moser.hpp"
#include "hheat/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  long seed = -1;
  int threads = -1;
  std::vector<std::string> overrides;
};

hheat::ExperimentConfig resolve_config(const CommonArgs& args) {
  hheat::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = hheat::ExperimentConfig::load(args.config_path);
  for (const std::string& kv : args.overrides) cfg.apply_override(kv);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed >= 0) cfg.seed = args.seed;
  if (args.threads > 0) cfg.threads = args.threads;
  fs::create_directories(cfg.out_dir);
  cfg.save((fs::path(cfg.out_dir) / "config_resolved.json").string());
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (JSON)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "seed for randomized sampling");
  cmd->add_option("--threads", args.threads, "worker thread cap");
  cmd->add_option("--override", args.overrides, "KEY=VALUE config override (repeatable)")
      ->take_all();
}

// Random point on the gauge annulus [g_min, g_max], bounded away from the
// z = 0 axis so relative comparisons stay well conditioned.
hheat::GroupPoint random_annulus_point(std::mt19937_64& rng, int N, double g_min, double g_max) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double s = g_min + (g_max - g_min) * uni(rng);
  const double theta = (uni(rng) - 0.5) * 2.4;  // |theta| <= 1.2 < pi/2
  const double znorm = std::sqrt(std::cos(theta));
  const double l = std::sin(theta);
  std::vector<double> z(2 * N);
  std::normal_distribution<double> gauss;
  double nrm = 0;
  for (double& v : z) {
    v = gauss(rng);
    nrm += v * v;
  }
  nrm = std::sqrt(nrm);
  for (double& v : z) v *= znorm / nrm;
  return hheat::dilate(s, hheat::GroupPoint(z, l));
}

int cmd_verify(const hheat::ExperimentConfig& cfg) {
  const std::string hash = cfg.hash();
  std::mt19937_64 rng(std::uint64_t(cfg.seed));
  std::vector<json> records;
  int failures = 0;
  auto check = [&](const hheat::VerificationRecord& rec, bool pass) {
    records.push_back(hheat::record_to_json(rec, pass));
    if (!pass) {
      ++failures;
      std::cout << "[FAIL] " << rec.identity_name << " rel_error=" << rec.rel_error
                << " fitted_order=" << rec.fitted_order << "\n";
    }
  };

  if (cfg.verify_samples == 0) {
    std::cout << "warning: empty sample plan, nothing verified\n";
    hheat::write_jsonl((fs::path(cfg.out_dir) / "verify.jsonl").string(), records);
    return 0;
  }

  const int N = cfg.N;
  const double h = cfg.verify_h;
  const double sabotage = cfg.verify_negative_control_offset;

  // closed forms of the gauge calculus against flow-difference oracles; the
  // convergence order is fitted on the ensemble max per ladder step, which is
  // immune to per-point cancellations of the leading error coefficient
  {
    std::vector<double> hs = {h, h / 2, h / 4};
    std::vector<double> max_err(3, 0.0);
    for (int i = 0; i < cfg.verify_samples; ++i) {
      const auto w = random_annulus_point(rng, N, cfg.verify_gauge_min, cfg.verify_gauge_max);
      const double alpha = (0.25 + 0.25 * (i % 3)) * N;
      for (auto rec : {hheat::verify_eikonal(w, h), hheat::verify_gauge_sublaplacian(w, h),
                       hheat::verify_dalpha_identity(w, alpha, h)}) {
        if (rec.identity_name == "dalpha") {
          rec.closed_form_value +=
              sabotage * std::pow(hheat::gauge(w), -alpha) * hheat::hardy_density(w);
          rec.finalize();
        }
        check(rec, rec.rel_error <= 1e-5);
        const double scale = std::max(std::abs(rec.closed_form_value), 1e-300);
        for (int k = 0; k < 3; ++k)
          max_err[k] = std::max(max_err[k], rec.step_errors[k] / scale);
      }
    }
    hheat::VerificationRecord ens;
    ens.identity_name = "gauge_calculus_ensemble_order";
    ens.step_sizes = hs;
    ens.step_errors = max_err;
    ens.closed_form_value = 2.0;
    ens.oracle_value = hheat::VerificationRecord::fit_order(hs, max_err);
    ens.finalize();
    check(ens, std::abs(ens.oracle_value - 2.0) <= 0.3);
  }

  // dilation covariance on the smooth field library
  for (const auto& field : hheat::standard_field_library(N))
    for (double lambda : {0.5, 2.0, 3.0})
      for (int i = 0; i < 5; ++i) {
        const auto w = random_annulus_point(rng, N, 0.3, 1.5);
        auto rec = hheat::verify_dilation_covariance(field.f, lambda, w, 0.05);
        check(rec, rec.abs_error <= 1e-8 * std::max(1.0, std::abs(rec.closed_form_value)));
        auto ps = hheat::verify_potential_scaling(1.0, lambda, w);
        check(ps, ps.rel_error <= 1e-12);
      }

  // radial reduction: 1D weighted quadrature against the 3D oracle
  for (double alpha : {0.0, 0.5, 0.9}) {
    auto profile = hheat::RadialProfile::sample(
        [](double s) { return s * s * (1 - s) * (1 - s); }, 0.0, 1.0, 2000, alpha);
    const double v1 = hheat::radial_reduce(profile, alpha, 1.0, N);
    const double v3 = hheat::radial_reduce_oracle(profile, alpha, 1.0, N, cfg.verify_quad_cells);
    hheat::VerificationRecord rec;
    rec.identity_name = "radial_reduction";
    rec.sample_point = {alpha};
    rec.closed_form_value = v1;
    rec.oracle_value = v3;
    rec.finalize();
    check(rec, rec.rel_error <= 5e-3);
  }

  // weighted interpolation inequality: empirical constant, stable under family growth
  {
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    double max50 = 0, max100 = 0;
    for (int i = 0; i < 2 * cfg.verify_sobolev_family; ++i) {
      const double a = uni(rng), b = uni(rng), c0 = uni(rng);
      auto prof = hheat::RadialProfile::sample(
          [&](double s) { return c0 + a * s * s + b * std::exp(-8 * (s - 0.5) * (s - 0.5)); },
          0.0, 1.0, 512, 0.5);
      const double r = hheat::sobolev_ratio(prof, 0.5, 1.0, N);
      if (i < cfg.verify_sobolev_family) max50 = std::max(max50, r);
      max100 = std::max(max100, r);
    }
    hheat::VerificationRecord rec;
    rec.identity_name = "sobolev_ratio_stability";
    rec.closed_form_value = max50;
    rec.oracle_value = max100;
    rec.finalize();
    check(rec, std::isfinite(max100) && max100 <= 1.1 * max50 + 1e-12);
  }

  // sup-bound recursion: exact rational equality with the closed form
  for (const hheat::Rational beta : {hheat::Rational(1, 2), hheat::Rational(1), hheat::Rational(2)}) {
    auto st = hheat::MoserState::initial(beta, 1.0, 2.0, 0.5);
    bool exact = true;
    for (; st.n < 12; st = hheat::moser_advance(st, 2.0, 0.5)) {
      exact = exact && (st.a == hheat::moser_a_closed(beta, st.n)) &&
              (st.dcoef == hheat::moser_d_closed(beta, st.n));
    }
    hheat::VerificationRecord rec;
    rec.identity_name = "moser_recursion_exact";
    rec.sample_point = {beta.to_double()};
    rec.closed_form_value = 1;
    rec.oracle_value = exact ? 1 : 0;
    rec.finalize();
    check(rec, exact);
  }

  // integrability dichotomy of the nonexistence mechanism
  {
    const auto sup = hheat::divergence_probe(hheat::DivergenceCase::Supercritical, 0, N,
                                             {1e-1, 1e-2, 1e-3}, cfg.verify_quad_cells);
    const bool increasing = sup[0].value_3d < sup[1].value_3d && sup[1].value_3d < sup[2].value_3d;
    const double inc1 = sup[1].value_3d - sup[0].value_3d;
    const double inc2 = sup[2].value_3d - sup[1].value_3d;
    hheat::VerificationRecord rec;
    rec.identity_name = "divergence_supercritical";
    rec.closed_form_value = inc1;
    rec.oracle_value = inc2;
    rec.finalize();
    check(rec, increasing && inc2 >= 0.8 * inc1);

    const auto sub = hheat::divergence_probe(hheat::DivergenceCase::Subcritical, 0.5, N,
                                             {1e-1, 1e-2, 1e-3}, cfg.verify_quad_cells);
    const double tail = (sub[2].value_1d - sub[1].value_1d) / sub[2].value_1d;
    hheat::VerificationRecord rec2;
    rec2.identity_name = "divergence_subcritical_cauchy";
    rec2.closed_form_value = sub[1].value_1d;
    rec2.oracle_value = sub[2].value_1d;
    rec2.finalize();
    check(rec2, tail <= 0.01);
  }

  hheat::write_jsonl((fs::path(cfg.out_dir) / "verify.jsonl").string(), records);
  std::cout << "verify: " << records.size() << " records, " << failures
            << " failures (config " << hash << ")\n";
  return failures == 0 ? 0 : 1;
}

int cmd_hardy(const hheat::ExperimentConfig& cfg) {
  if (cfg.hardy_levels.size() < 2) {
    std::cerr << "hardy: need >= 2 refinement levels\n";
    return 2;
  }
  hheat::HardyOptions opts;
  opts.sampling = cfg.hardy_sampling == "center" ? hheat::PotentialSampling::Center
                                              : hheat::PotentialSampling::CellAverage;
  opts.max_power_iterations = cfg.hardy_max_power_iterations;
  opts.tol = cfg.hardy_tol;
  opts.cg.tol = cfg.hardy_cg_tol;
  const auto levels = hheat::estimate_hardy_constant(cfg.N, cfg.z_halfwidth, cfg.l_halfwidth,
                                                     cfg.hardy_levels, opts);
  hheat::CsvWriter csv((fs::path(cfg.out_dir) / "hardy.csv").string(),
                       {"cells", "estimate", "target", "power_iterations", "converged"},
                       cfg.hash());
  const double target = double(cfg.N) * cfg.N;
  for (const auto& lvl : levels) {
    csv.row({double(lvl.cells), lvl.estimate, target, double(lvl.power_iterations),
             lvl.converged ? 1.0 : 0.0});
    std::cout << "hardy cells=" << lvl.cells << " estimate=" << lvl.estimate
              << " target=" << target << (lvl.converged ? "" : " [not converged]") << "\n";
  }
  return 0;
}

int cmd_kernel(const hheat::ExperimentConfig& cfg) {
  const auto spec = cfg.grid_spec();
  const auto A = hheat::assemble_sublaplacian(spec);
  hheat::CsvWriter csv((fs::path(cfg.out_dir) / "kernel.csv").string(),
                       {"t", "slope", "intercept", "r2", "mass", "min_value", "spread_cells"},
                       cfg.hash());
  hheat::SolverOptions solver{cfg.kernel_solver_tol, cfg.solver_max_iterations};
  const hheat::GroupParams gp(cfg.N);
  for (double t : cfg.kernel_times) {
    const auto fit = hheat::heat_kernel_fit(spec, A, t, cfg.kernel_dt, cfg.kernel_floor_rel,
                                            cfg.kernel_min_spread, solver);
    csv.row({fit.t, fit.slope, fit.intercept, fit.r2, fit.mass, fit.min_value,
             double(fit.spread_cells)});
    std::cout << "kernel t=" << t << " slope=" << fit.slope << " r2=" << fit.r2
              << " mass=" << fit.mass << "\n";

    // scatter data for external plotting
    hheat::GridField u = hheat::delta_initial_data(spec);
    hheat::GridField zero(spec);
    hheat::HeatStepper st(A, cfg.kernel_dt, zero, zero, solver);
    const std::int64_t steps = std::llround(t / cfg.kernel_dt);
    for (std::int64_t k = 0; k < steps; ++k) st.diffuse_inplace(u);
    char name[64];
    std::snprintf(name, sizeof name, "kernel_scatter_t%.3f.csv", t);
    hheat::CsvWriter sc((fs::path(cfg.out_dir) / name).string(), {"d2_over_t", "neglog_p_tq"},
                        cfg.hash());
    const double umax = u.sup_norm();
    const double tq = std::pow(t, 0.5 * gp.Q);
    for (std::int64_t f = 0; f < spec.size(); ++f) {
      if (u.values[f] < cfg.kernel_floor_rel * umax || u.values[f] <= 0) continue;
      const double d = spec.node_gauge(f);
      sc.row({d * d / t, -std::log(u.values[f] * tq)});
    }
  }
  return 0;
}

int cmd_cascade(const hheat::ExperimentConfig& cfg) {
  const auto cc = cfg.cascade_config();
  hheat::CascadeReport rep = hheat::run_cascade(cc);
  const std::string hash = cfg.hash();

  std::ofstream rj(fs::path(cfg.out_dir) / "cascade_report.json");
  rj << hheat::cascade_report_to_json(rep, hash).dump(2) << "\n";

  hheat::CsvWriter probes((fs::path(cfg.out_dir) / "cascade_probes.csv").string(),
                          {"n", "t", "probe_id", "value"}, hash);
  hheat::CsvWriter masses((fs::path(cfg.out_dir) / "cascade_weighted_mass.csv").string(),
                          {"n", "t", "weighted_mass"}, hash);
  for (const auto& run : rep.runs)
    for (std::size_t s = 0; s < run.times.size(); ++s) {
      for (std::size_t p = 0; p < run.probe_values[s].size(); ++p)
        probes.row({run.n, run.times[s], double(p), run.probe_values[s][p]});
      masses.row({run.n, run.times[s], run.weighted_mass[s]});
    }

  std::ofstream sum(fs::path(cfg.out_dir) / "summary.txt");
  auto line = [&](const std::string& s) {
    sum << s << "\n";
    std::cout << s << "\n";
  };
  line("cascade c=" + std::to_string(rep.c) + " Cstar=" + std::to_string(rep.Cstar) +
       " alpha=" + std::to_string(rep.alpha));
  line("verdict: " + hheat::to_string(rep.verdict) + (rep.critical ? " [critical]" : ""));
  if (!rep.note.empty()) line("note: " + rep.note);
  line("final probe ratio: " + std::to_string(rep.evidence.final_ratio));
  line("log-log growth slope: " + std::to_string(rep.evidence.loglog_slope));
  line("growth across schedule: " + std::to_string(rep.evidence.growth));
  double worst_margin = 0;
  for (const auto& run : rep.runs)
    if (std::isfinite(run.margin_norm)) worst_margin = std::min(worst_margin, run.margin_norm);
  line("worst normalized monotonicity margin: " + std::to_string(worst_margin));
  return 0;
}

int cmd_report(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "cascade_report.json");
  if (!in) {
    std::cerr << "report: no cascade_report.json under " << dir << "\n";
    return 2;
  }
  json j;
  in >> j;
  std::cout << "cascade report (config " << j.value("config_hash", "?") << ")\n"
            << "  c=" << j["c"] << " alpha=" << j["alpha"] << " C*=" << j["Cstar"] << "\n"
            << "  verdict: " << j["verdict"].get<std::string>()
            << (j.value("critical", false) ? " [critical]" : "") << "\n"
            << "  growth=" << j["evidence"]["growth"] << " slope=" << j["evidence"]["loglog_slope"]
            << " final_ratio=" << j["evidence"]["final_ratio"] << "\n";
  for (const auto& run : j["runs"])
    std::cout << "  n=" << run["n"] << " final_probe=" << run["probe_values"].back()[0]
              << (run["reused"].get<bool>() ? " (reused)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Hardy-potential heat flow on the Heisenberg group"};
  app.require_subcommand(1);

  CommonArgs verify_args, hardy_args, kernel_args, cascade_args;
  std::string report_dir = "out";

  CLI::App* verify = app.add_subcommand("verify", "run the identity verification suite");
  add_common(verify, verify_args);
  CLI::App* hardy = app.add_subcommand("hardy", "Rayleigh-quotient Hardy constant refinement");
  add_common(hardy, hardy_args);
  CLI::App* kernel = app.add_subcommand("kernel", "heat kernel mass/positivity/Gaussian fit");
  add_common(kernel, kernel_args);
  CLI::App* cascade = app.add_subcommand("cascade", "truncated-potential cascade and dichotomy");
  add_common(cascade, cascade_args);
  CLI::App* report = app.add_subcommand("report", "summarize a cascade output directory");
  report->add_option("--out", report_dir, "output directory to summarize");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(resolve_config(verify_args));
    if (hardy->parsed()) return cmd_hardy(resolve_config(hardy_args));
    if (kernel->parsed()) return cmd_kernel(resolve_config(kernel_args));
    if (cascade->parsed()) return cmd_cascade(resolve_config(cascade_args));
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
