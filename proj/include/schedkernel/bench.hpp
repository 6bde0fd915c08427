#pragma once

// Experiment runner comparing the fixed-point solver (RTA / QPA) with the
// cutting-plane solver.
//
//   I   FP systems, iteration counts     II  FP systems, wall time
//   III EDF systems, iteration counts    IV  EDF systems, wall time
//
// FP experiments analyse the lowest-priority task with the improved
// reduction; EDF experiments run the full test with L = floor(L_b) + 1.
// Every pair of runs must agree on the verdict.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "schedkernel/arith.hpp"
#include "schedkernel/demand.hpp"
#include "schedkernel/kernel.hpp"

namespace schedkernel {

struct RunStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population
  std::size_t count = 0;
};

// Throws std::invalid_argument on an empty sample.
RunStats aggregate(std::span<const double> samples);

// n / sum_j (1 / T_j). Throws std::invalid_argument for an empty system.
Rational harmonic_mean_periods(const TaskSystem& system);

// sum_j (upper - lower) / period_j, i.e. (b - a) n / T_hm: the number of
// steps of phi the range is expected to contain. Zero for an empty range.
Rational predicted_steps(const KernelInstance& inst);

// 2 + sum_j ceil((upper - lower) / period_j): no solver records more
// iterations than this on the instance.
Int iteration_bound(const KernelInstance& inst);

enum class Experiment { kI, kII, kIII, kIV };

const char* experiment_name(Experiment experiment);
std::optional<Experiment> parse_experiment(std::string_view name);
bool uses_fp_systems(Experiment experiment);
bool measures_time(Experiment experiment);

struct Cell {
  std::size_t n = 25;
  double total_util = 0.9;
  double total_density = 0.0;  // EDF only

  bool operator==(const Cell&) const = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::kI;
  std::vector<Cell> cells;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::size_t timing_repeats = 3;  // median of this many runs per solver
  bool keep_raw = false;
};

// I/II: n in {25, 50, 75} x U in {0.7, 0.8, 0.9}.
// III/IV: the seven (n, U, density) cells of the EDF study, all varying
// one parameter from (25, 0.9, 1.5).
ExperimentConfig default_config(Experiment experiment);

// Throws std::invalid_argument for zero samples, empty cell lists or cells
// the generator cannot produce.
void validate(const ExperimentConfig& cfg);

struct SampleRecord {
  std::size_t index = 0;
  double fp = 0.0;  // iterations or microseconds
  double cp = 0.0;
  double ratio = 1.0;
  std::size_t fp_iterations = 0;
  std::size_t cp_iterations = 0;
  bool schedulable = true;
  double predicted_steps = 0.0;
};

struct CellResult {
  Cell cell;
  RunStats fp;
  RunStats cp;
  RunStats ratio;
  // Samples where the cutting-plane solver needed more iterations.
  std::size_t dominance_violations = 0;
  // Solves that exceeded iteration_bound().
  std::size_t bound_violations = 0;
  std::size_t unschedulable = 0;
  std::vector<SampleRecord> raw;  // only with keep_raw
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;

  std::size_t dominance_violations() const;
  std::size_t bound_violations() const;
};

// The two solvers disagreed. `system` is the offending task set as JSON.
class InconsistencyError : public std::runtime_error {
 public:
  InconsistencyError(const std::string& what, std::string system)
      : std::runtime_error(what), system_(std::move(system)) {}
  const std::string& system() const { return system_; }

 private:
  std::string system_;
};

// fp / cp, with 0 / 0 taken as 1.
double sample_ratio(double fp, double cp);

ExperimentResult run_fp_experiment(const ExperimentConfig& cfg);
ExperimentResult run_edf_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// One row per (cell, algo) with algo in {fp, cp, ratio}.
std::string to_csv(const ExperimentResult& result);
// One JSON object per sample; empty unless keep_raw was set.
std::string to_jsonl(const ExperimentResult& result);
// Human-readable table: (min, max), mean and variance per algorithm.
std::string summary_table(const ExperimentResult& result);

}  // namespace schedkernel
