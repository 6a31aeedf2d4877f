#include "hheat/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hheat {

using nlohmann::json;

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["group"]["N"] = N;
  j["seed"] = seed;
  j["threads"] = threads;
  j["out"] = out_dir;
  j["grid"] = {{"z_halfwidth", z_halfwidth},
               {"l_halfwidth", l_halfwidth},
               {"z_cells", z_cells},
               {"l_cells", l_cells}};
  j["solver"] = {{"tol", solver_tol}, {"max_iterations", solver_max_iterations}};
  j["verify"] = {{"samples", verify_samples},
                 {"gauge_min", verify_gauge_min},
                 {"gauge_max", verify_gauge_max},
                 {"h", verify_h},
                 {"negative_control_offset", verify_negative_control_offset},
                 {"sobolev_family", verify_sobolev_family},
                 {"quad_cells", verify_quad_cells}};
  j["hardy"] = {{"levels", hardy_levels},
                {"max_power_iterations", hardy_max_power_iterations},
                {"tol", hardy_tol},
                {"cg_tol", hardy_cg_tol},
                {"sampling", hardy_sampling}};
  j["potential_sampling"] = potential_sampling;
  j["kernel"] = {{"times", kernel_times},
                 {"dt", kernel_dt},
                 {"floor_rel", kernel_floor_rel},
                 {"min_spread", kernel_min_spread},
                 {"solver_tol", kernel_solver_tol}};
  j["cascade"] = {{"c", cascade_c},
                  {"schedule", cascade_schedule},
                  {"T", cascade_T},
                  {"dt", cascade_dt},
                  {"u0_radius", cascade_u0_radius},
                  {"f_const", cascade_f_const},
                  {"tau_conv", cascade_tau_conv},
                  {"tau_blow", cascade_tau_blow},
                  {"margin_hard_tol", cascade_margin_hard_tol},
                  {"solver_tol", cascade_solver_tol},
                  {"probes", cascade_probes},
                  {"sample_count", cascade_sample_count}};
  if (cascade_alpha_override)
    j["cascade"]["alpha_override"] = *cascade_alpha_override;
  else
    j["cascade"]["alpha_override"] = nullptr;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;  // unspecified keys keep their defaults
  auto get = [](const json& o, const char* k, auto& target) {
    if (o.contains(k)) target = o.at(k).template get<std::decay_t<decltype(target)>>();
  };
  get(j, "schema_version", c.schema_version);
  if (j.contains("group")) get(j["group"], "N", c.N);
  get(j, "seed", c.seed);
  get(j, "threads", c.threads);
  get(j, "out", c.out_dir);
  if (j.contains("grid")) {
    get(j["grid"], "z_halfwidth", c.z_halfwidth);
    get(j["grid"], "l_halfwidth", c.l_halfwidth);
    get(j["grid"], "z_cells", c.z_cells);
    get(j["grid"], "l_cells", c.l_cells);
  }
  if (j.contains("solver")) {
    get(j["solver"], "tol", c.solver_tol);
    get(j["solver"], "max_iterations", c.solver_max_iterations);
  }
  if (j.contains("verify")) {
    get(j["verify"], "samples", c.verify_samples);
    get(j["verify"], "gauge_min", c.verify_gauge_min);
    get(j["verify"], "gauge_max", c.verify_gauge_max);
    get(j["verify"], "h", c.verify_h);
    get(j["verify"], "negative_control_offset", c.verify_negative_control_offset);
    get(j["verify"], "sobolev_family", c.verify_sobolev_family);
    get(j["verify"], "quad_cells", c.verify_quad_cells);
  }
  if (j.contains("hardy")) {
    get(j["hardy"], "levels", c.hardy_levels);
    get(j["hardy"], "max_power_iterations", c.hardy_max_power_iterations);
    get(j["hardy"], "tol", c.hardy_tol);
    get(j["hardy"], "cg_tol", c.hardy_cg_tol);
    get(j["hardy"], "sampling", c.hardy_sampling);
  }
  get(j, "potential_sampling", c.potential_sampling);
  if (j.contains("kernel")) {
    get(j["kernel"], "times", c.kernel_times);
    get(j["kernel"], "dt", c.kernel_dt);
    get(j["kernel"], "floor_rel", c.kernel_floor_rel);
    get(j["kernel"], "min_spread", c.kernel_min_spread);
    get(j["kernel"], "solver_tol", c.kernel_solver_tol);
  }
  if (j.contains("cascade")) {
    const json& a = j["cascade"];
    get(a, "c", c.cascade_c);
    get(a, "schedule", c.cascade_schedule);
    get(a, "T", c.cascade_T);
    get(a, "dt", c.cascade_dt);
    get(a, "u0_radius", c.cascade_u0_radius);
    get(a, "f_const", c.cascade_f_const);
    get(a, "tau_conv", c.cascade_tau_conv);
    get(a, "tau_blow", c.cascade_tau_blow);
    get(a, "margin_hard_tol", c.cascade_margin_hard_tol);
    get(a, "solver_tol", c.cascade_solver_tol);
    get(a, "probes", c.cascade_probes);
    get(a, "sample_count", c.cascade_sample_count);
    if (a.contains("alpha_override") && !a["alpha_override"].is_null())
      c.cascade_alpha_override = a["alpha_override"].get<double>();
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  in >> j;
  return from_json(j);
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << to_json().dump(2) << "\n";
}

void ExperimentConfig::apply_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override must be KEY=VALUE: " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);

  json tree = to_json();
  json* node = &tree;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::parse_error&) {
        parsed = value;  // plain string
      }
      (*node)[part] = parsed;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
  *this = from_json(tree);
}

std::string ExperimentConfig::hash() const {
  const std::string s = to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return std::string(buf);
}

PotentialSampling ExperimentConfig::sampling_mode() const {
  if (potential_sampling == "center") return PotentialSampling::Center;
  if (potential_sampling == "cellavg") return PotentialSampling::CellAverage;
  throw std::invalid_argument("potential_sampling must be 'center' or 'cellavg'");
}

CascadeConfig ExperimentConfig::cascade_config() const {
  CascadeConfig cc;
  cc.grid = grid_spec();
  cc.c = cascade_c;
  cc.schedule = cascade_schedule;
  cc.T = cascade_T;
  cc.dt = std::min(cascade_dt, 1.0 / cascade_schedule.back());
  cc.u0_radius = cascade_u0_radius;
  cc.f_const = cascade_f_const;
  for (const auto& p : cascade_probes) {
    if (int(p.size()) != 2 * N + 1)
      throw std::invalid_argument("cascade probe has wrong dimension");
    std::vector<double> z(p.begin(), p.end() - 1);
    cc.probes.emplace_back(z, p.back());
  }
  cc.alpha_override = cascade_alpha_override;
  cc.sampling = sampling_mode();
  cc.thresholds = {cascade_tau_conv, cascade_tau_blow};
  cc.margin_hard_tol = cascade_margin_hard_tol;
  cc.solver = {cascade_solver_tol, solver_max_iterations};
  for (int k = 1; k <= cascade_sample_count; ++k)
    cc.sample_times.push_back(cascade_T * k / cascade_sample_count);
  return cc;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::string& config_hash)
    : path_(path) {
  std::ofstream out(path_);
  if (!out) throw std::runtime_error("csv: cannot write " + path_);
  out << "# schema_version=1 config_hash=" << config_hash << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::ofstream out(path_, std::ios::app);
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << (i ? "," : "") << buf;
  }
  out << "\n";
}

void CsvWriter::raw_row(const std::string& line) {
  std::ofstream out(path_, std::ios::app);
  out << line << "\n";
}

json record_to_json(const VerificationRecord& rec, bool pass) {
  json j;
  j["identity"] = rec.identity_name;
  j["sample_point"] = rec.sample_point;
  j["closed_form"] = rec.closed_form_value;
  j["oracle"] = rec.oracle_value;
  j["abs_error"] = rec.abs_error;
  j["rel_error"] = rec.rel_error;
  j["step_sizes"] = rec.step_sizes;
  j["step_errors"] = rec.step_errors;
  if (std::isfinite(rec.fitted_order))
    j["fitted_order"] = rec.fitted_order;
  else
    j["fitted_order"] = nullptr;
  j["pass"] = pass;
  return j;
}

void write_jsonl(const std::string& path, const std::vector<json>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("jsonl: cannot write " + path);
  for (const json& j : lines) out << j.dump() << "\n";
}

json cascade_report_to_json(const CascadeReport& rep, const std::string& config_hash) {
  json j;
  j["schema_version"] = 1;
  j["config_hash"] = config_hash;
  j["N"] = rep.N;
  j["c"] = rep.c;
  j["Cstar"] = rep.Cstar;
  j["alpha"] = rep.alpha;
  j["critical"] = rep.critical;
  j["verdict"] = to_string(rep.verdict);
  j["note"] = rep.note;
  j["u0_mass"] = rep.u0_mass;
  j["u0_weighted_mass"] = rep.u0_weighted_mass;
  j["f_weighted_rate"] = rep.f_weighted_rate;
  j["evidence"] = {{"final_probe", rep.evidence.final_probe},
                   {"ratios", rep.evidence.ratios},
                   {"final_ratio", rep.evidence.final_ratio},
                   {"loglog_slope", rep.evidence.loglog_slope},
                   {"growth", rep.evidence.growth}};
  j["runs"] = json::array();
  for (const auto& run : rep.runs) {
    json r;
    r["n"] = run.n;
    r["reused"] = run.reused;
    r["times"] = run.times;
    r["probe_values"] = run.probe_values;
    r["weighted_mass"] = run.weighted_mass;
    r["sup_norm"] = run.sup_norm;
    r["mass"] = run.mass;
    r["margin_abs"] = std::isfinite(run.margin_abs) ? json(run.margin_abs) : json(nullptr);
    r["margin_norm"] = std::isfinite(run.margin_norm) ? json(run.margin_norm) : json(nullptr);
    j["runs"].push_back(std::move(r));
  }
  return j;
}

void save_snapshots(const std::string& dir, const std::string& stem,
                    const std::vector<GridField>& snaps, const json& extra_meta) {
  if (snaps.empty()) throw std::invalid_argument("save_snapshots: nothing to save");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const GridSpec& spec = snaps.front().spec;

  std::ofstream bin(fs::path(dir) / (stem + ".bin"), std::ios::binary);
  for (const GridField& f : snaps)
    bin.write(reinterpret_cast<const char*>(f.values.data()),
              std::streamsize(f.values.size() * sizeof(double)));

  json meta;
  meta["schema_version"] = 1;
  meta["grid"] = {{"N", spec.N}, {"lo", spec.lo}, {"hi", spec.hi}, {"cells", spec.cells}};
  std::vector<double> times;
  for (const GridField& f : snaps) times.push_back(f.time_tag);
  meta["times"] = times;
  meta["extra"] = extra_meta;
  std::ofstream side(fs::path(dir) / (stem + ".json"));
  side << meta.dump(2) << "\n";
}

std::vector<GridField> load_snapshots(const std::string& dir, const std::string& stem) {
  namespace fs = std::filesystem;
  std::ifstream side(fs::path(dir) / (stem + ".json"));
  if (!side) throw std::runtime_error("load_snapshots: missing sidecar");
  json meta;
  side >> meta;
  GridSpec spec;
  spec.N = meta["grid"]["N"].get<int>();
  spec.lo = meta["grid"]["lo"].get<std::vector<double>>();
  spec.hi = meta["grid"]["hi"].get<std::vector<double>>();
  spec.cells = meta["grid"]["cells"].get<std::vector<int>>();
  spec.validate();
  const std::vector<double> times = meta["times"].get<std::vector<double>>();

  std::ifstream bin(fs::path(dir) / (stem + ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("load_snapshots: missing binary payload");
  std::vector<GridField> out;
  for (double t : times) {
    GridField f(spec, 0.0, t);
    bin.read(reinterpret_cast<char*>(f.values.data()),
             std::streamsize(f.values.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("load_snapshots: truncated binary payload");
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace hheat
