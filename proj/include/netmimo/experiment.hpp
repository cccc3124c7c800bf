#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmimo/enhance.hpp"

namespace netmimo {

/// Monte Carlo sweep description. Defaults mirror the reference experiment:
/// a [3 2 3 2] network swept over 0..25 dB in 5 dB steps, 500 trials.
struct ExperimentSpec {
  std::array<int, 4> dims{3, 2, 3, 2}; // [K_t N_t K_r N_r]
  std::vector<double> snr_list_db{0, 5, 10, 15, 20, 25};
  int trials = 500;
  std::uint64_t base_seed = 42;
  bool scheme_bd = true;
  bool scheme_proposed = true;
  std::string out_path = "results.csv";
  std::string aggregate_path;
  int jobs = 1;
  bool timing = false; // wall_ms column reads 0 unless enabled (reproducible output)

  // trace mode
  std::optional<double> trace_snr_db;
  std::optional<std::uint64_t> trace_seed;

  NetworkConfig config_at(double snr_db) const;
  void validate() const; // throws std::invalid_argument naming the field
};

/// Optional command-line overrides layered on top of a config file.
struct SpecOverrides {
  std::optional<std::vector<double>> snr_list_db;
  std::optional<int> trials;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::string> schemes; // comma list, e.g. "bd,proposed"
  std::optional<int> jobs;
  std::optional<std::string> out_path;
  std::optional<std::string> aggregate_path;
  std::optional<bool> timing;
  std::optional<double> trace_snr_db;
  std::optional<std::uint64_t> trace_seed;
  std::optional<std::string> trace_out;
};

/// Flat-key JSON config. Unknown keys are rejected; missing keys keep their
/// defaults. Throws std::invalid_argument naming the offending field.
ExperimentSpec parse_config_file(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text);
void apply_overrides(ExperimentSpec& spec, const SpecOverrides& ovr);
std::vector<bool> parse_schemes(const std::string& schemes); // {bd, proposed}

/// One output row of the sweep.
struct ResultRow {
  double snr_db = 0.0;
  int trial = 0;
  std::string scheme;
  double sum_rate_nats = 0.0;
  double sum_rate_bits = 0.0;
  double rho = 1.0;
  double snr_boost_db = 0.0;
  int iterations = 0;
  long wall_ms = 0;
  std::string status = "ok";
};

struct AggregateRow {
  double snr_db = 0.0;
  std::string scheme;
  int trials = 0;
  double mean_sum_rate_nats = 0.0;
  double stderr_sum_rate_nats = 0.0;
  double mean_sum_rate_bits = 0.0;
  double stderr_sum_rate_bits = 0.0;
  double mean_rho = 1.0;
  double mean_snr_boost_db = 0.0;
  double stderr_snr_boost_db = 0.0;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregate;
};

/// Runs the sweep: channels seeded per (base_seed, snr index, trial), BD and
/// optionally the improved scheme per trial. Trials run on `jobs` threads;
/// rows are emitted in (snr, trial, scheme) order regardless of scheduling.
/// Solver failures are recorded in the row's status and the run continues.
SweepResult run_sweep(const ExperimentSpec& spec);

/// Writes rows/aggregate as CSV (comma separated, header row, '.' decimals,
/// LF endings).
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);

struct TraceResult {
  std::vector<EnhanceIterate> iterates;
  double bd_sum_rate_nats = 0.0;
  double final_rho = 1.0;
};

/// Convergence trace of the improved-precoder solve at one (snr, seed) point.
TraceResult run_convergence_trace(const ExperimentSpec& spec);
void write_trace_csv(const std::string& path, const TraceResult& trace);

}  // namespace netmimo
