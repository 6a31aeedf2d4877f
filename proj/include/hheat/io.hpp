#ifndef HHEAT_IO_HPP
#define HHEAT_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "hheat/cascade.hpp"
#include "hheat/grid.hpp"
#include "hheat/verify.hpp"

#include <json.hpp>

namespace hheat {

// Resolved experiment configuration; round-trips losslessly through JSON with
// every default materialized in the serialized form.
struct ExperimentConfig {
  int schema_version = 1;
  int N = 1;
  long seed = 12345;
  int threads = 1;
  std::string out_dir = "out";

  // grid
  double z_halfwidth = 2.0;
  double l_halfwidth = 4.0;
  int z_cells = 64;
  int l_cells = 64;

  // solver
  double solver_tol = 1e-10;
  int solver_max_iterations = 10000;

  // verify
  int verify_samples = 200;
  double verify_gauge_min = 0.25;
  double verify_gauge_max = 2.0;
  double verify_h = 1e-3;
  double verify_negative_control_offset = 0.0;  // shifts the d^-alpha constant; self-test hook
  int verify_sobolev_family = 50;
  int verify_quad_cells = 40;

  // hardy
  std::vector<int> hardy_levels = {32, 48, 64};
  int hardy_max_power_iterations = 400;
  double hardy_tol = 1e-9;
  double hardy_cg_tol = 1e-8;
  std::string potential_sampling = "center";  // cascade sampling: "center" or "cellavg"
  std::string hardy_sampling = "cellavg";     // mass-vector quadrature for the Hardy estimate

  // kernel
  std::vector<double> kernel_times = {0.05, 0.1, 0.2};
  double kernel_dt = 1e-3;
  double kernel_floor_rel = 1e-6;
  int kernel_min_spread = 5;
  double kernel_solver_tol = 1e-13;

  // cascade
  double cascade_c = 0.5;
  std::vector<double> cascade_schedule = {1, 3, 10, 30, 100, 300, 1000};
  double cascade_T = 1.0;
  double cascade_dt = 1e-3;
  double cascade_u0_radius = 0.75;
  double cascade_f_const = 0.0;
  double cascade_tau_conv = 0.05;
  double cascade_tau_blow = 0.5;
  double cascade_margin_hard_tol = 1e-8;
  double cascade_solver_tol = 5e-14;
  std::vector<std::vector<double>> cascade_probes = {
      {0.16, 0.16, 0.06}, {0.66, 0.16, 0.19}, {1.03, 0.53, 0.44}};
  int cascade_sample_count = 10;
  std::optional<double> cascade_alpha_override;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;

  // Applies "dotted.key=value" overrides onto the serialized tree.
  void apply_override(const std::string& key_eq_value);

  std::string hash() const;  // FNV-1a of the canonical serialized form

  GridSpec grid_spec() const { return GridSpec::box(N, z_halfwidth, l_halfwidth, z_cells, l_cells); }
  PotentialSampling sampling_mode() const;
  CascadeConfig cascade_config() const;
};

// CSV writer: one comment line naming schema version and config hash, then a
// header row and data rows at full precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::string& config_hash);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  std::string path_;
};

nlohmann::json record_to_json(const VerificationRecord& rec, bool pass);
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& lines);

nlohmann::json cascade_report_to_json(const CascadeReport& rep, const std::string& config_hash);

// Trajectory persistence: flat binary doubles plus a JSON sidecar carrying the
// grid geometry and time tags.
void save_snapshots(const std::string& dir, const std::string& stem,
                    const std::vector<GridField>& snaps, const nlohmann::json& extra_meta);
std::vector<GridField> load_snapshots(const std::string& dir, const std::string& stem);

}  // namespace hheat

#endif  // HHEAT_IO_HPP
