#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hodge {

/// Experiment drivers: the identity suite, the conformal cigar growth run,
/// its odd-dimensional negative control, and the eigenvalue gap-closing
/// search. Every pass/fail threshold is read from the configuration; the
/// code carries none.

struct ExperimentConfig {
  std::string experiment;
  int n = 4;

  // Torus mesh for the sweep experiments.
  int cells_per_axis = 5;
  double side_length = 5.0;
  bool grading = true;
  double grading_rate = 0.0;  // 0 = derive from the schedule

  std::vector<double> schedule;  // ascending positive profile lengths
  std::vector<int> degrees;
  int eigen_count = 6;
  std::uint64_t seed = 0;
  int gap_modes = 3;             // N of the gap-closing search
  std::vector<double> center;    // empty = chart center

  // Identity-suite mesh roster (sizes only; thresholds live below).
  std::vector<int> union_torus_cells = {3, 4};
  std::vector<int> union_sphere_refinements = {1, 2};
  bool conformal_union = true;
  int interlace_torus_cells = 4;
  int duality_torus_cells = 4;
  int surface_cells = 16;
  int fine_torus_cells = 64;
  int convergence_sphere_refinement = 3;
  int coarse_s3_refinement = 2;
  bool include_t4 = false;
  int t4_cells = 3;

  nlohmann::json thresholds;  // experiment-specific, required keys per run
};

/// Parses and validates a configuration document. Unknown keys are errors.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);

enum class ExperimentStatus { Pass, Inconclusive, Fail };

int experiment_exit_code(ExperimentStatus status);

struct ReportRow {
  std::string label;  // mesh or sweep identifier
  int n = 0;
  int p = 0;
  double length = 0.0;
  double volume = 0.0;
  double lambda_exact = 0.0;  // first eigenvalue on exact p-forms
  double lambda_full = 0.0;   // first positive eigenvalue on p-forms
  double product = 0.0;       // lambda_full * volume^{2/n}
  double wall_seconds = 0.0;  // JSON only; the CSV stays byte-stable
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentStatus status = ExperimentStatus::Fail;
  std::vector<ReportRow> rows;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json config_echo;
};

ExperimentReport run_identity_suite(const ExperimentConfig& cfg);
ExperimentReport run_cigar_growth(const ExperimentConfig& cfg);
ExperimentReport run_negative_control(const ExperimentConfig& cfg);
ExperimentReport run_gap_closing(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment: identity | cigar_growth | negative_control
/// | gap_closing.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// CSV: header experiment,label,n,p,L,volume,lambda_exact,lambda_full,product
/// (no timing column, so repeated runs are byte-identical).
std::string report_to_csv(const ExperimentReport& report);

/// JSON summary: config echo, rows with wall time, checks, status.
std::string report_to_json(const ExperimentReport& report);

/// Writes <experiment>.csv and <experiment>.json under out_dir (created if
/// missing) and returns the process exit code for the report status.
int write_experiment_outputs(const ExperimentReport& report,
                             const std::string& out_dir);

}  // namespace hodge
