#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vqs/pauli.hpp"

namespace vqs {

/// Invalid experiment description (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver failure during an otherwise valid experiment (exit code 1).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value experiment description; '#' starts a comment.
struct ExperimentConfig {
  std::string label = "experiment";
  std::string model;   // hubbard | schwinger | ising | ladder
  std::string method;  // ed | dmrg | rbm | vqe
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 1;

  // Model parameters (unused entries stay at their defaults).
  int n_sites = 4;
  double t = 1.0, u = 0.0;
  std::string ordering = "snake";
  std::string normalization = "per_site_over_t";
  double x = 100.0, mu = 0.0, ell = 0.0;
  double ising_j = 1.0, ising_g = 1.0;
  double c_h[3] = {0, 0, 0}, c_v[3] = {0, 0, 0};

  // Method parameters.
  double tol = 1e-12;
  int max_iter = 500;
  std::string sector = "auto";  // auto | none | total_z
  int sector_target = 0;

  int chi_max = 128;
  int n_sweeps = 8;
  double svd_cutoff = 1e-12;
  double energy_tol = 1e-12;

  int alpha = 4;
  double eta = 0.0;  // 0 = method default
  double lambda_reg = 1e-3;
  int n_iters = 0;   // 0 = method default
  int n_samples = 100;
  int n_burn = 1000;
  int thin = 1;
  std::string move = "single_flip";  // single_flip | exchange_pair
  std::optional<int> sector_total_z;
  std::string estimator = "sampled";  // sampled | exact

  int p_layers = 6;
  int report_window = 0;  // 0 = method default
  std::string grad_mode = "adjoint";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

struct ResultRecord {
  std::string label, model, method;
  int n_sites = 0;
  std::string model_params, method_params;
  double energy = 0.0;
  std::optional<double> energy_err;
  double energy_per_site = 0.0;
  double wall_time_s = 0.0;
  std::string build_id;
  std::uint64_t seed = 0;
};

struct ExperimentOutput {
  ResultRecord record;
  std::vector<std::vector<double>> trace_rows;
  std::vector<std::string> trace_header;
};

/// Runs the configured experiment in memory (no files).
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Runs and writes <output_dir>/result.csv and <output_dir>/trace.csv.
ResultRecord run_and_write(const ExperimentConfig& cfg);

/// One cell of a tabulated suite.
struct TableCell {
  std::string row_label, col_label;
  double value = 0.0;          // energy per site
  double err = 0.0;            // per-site error estimate when available
  double reference = 0.0;      // printed value being reproduced
  bool ok = false;             // cell executed without a solver failure
  std::string message;
};

struct TableResult {
  std::string name;
  std::vector<TableCell> cells;
  bool all_ok = true;
};

/// Reproduction suites table1..table6 with the published hyperparameters.
/// `jobs` > 1 runs independent cells concurrently.
TableResult run_table(const std::string& name, int jobs = 1,
                      std::uint64_t seed_override = 0);

void write_table_csv(std::ostream& out, const TableResult& table);

/// Formats a double with 17 significant digits, locale-independent.
std::string format_g17(double v);

extern const char* const kBuildId;

}  // namespace vqs
