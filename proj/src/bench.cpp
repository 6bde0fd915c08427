#include "schedkernel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "schedkernel/sched.hpp"
#include "schedkernel/taskgen.hpp"
#include "schedkernel/taskset_io.hpp"

namespace schedkernel {

namespace {

constexpr std::uint64_t kFpStream = 1;
constexpr std::uint64_t kEdfStream = 2;

std::uint64_t milli(double x) {
  return static_cast<std::uint64_t>(std::llround(x * 1000.0));
}

// Experiments I and II (and III and IV) draw the same systems.
Rng sample_rng(const ExperimentConfig& cfg, const Cell& cell,
               std::size_t sample) {
  const std::uint64_t stream =
      uses_fp_systems(cfg.experiment) ? kFpStream : kEdfStream;
  return derive_rng(cfg.seed, {stream, cell.n, milli(cell.total_util),
                               milli(cell.total_density), sample});
}

GenConfig gen_config(const ExperimentConfig& cfg, const Cell& cell) {
  GenConfig gen;
  gen.flavor = uses_fp_systems(cfg.experiment) ? Flavor::kFp : Flavor::kEdf;
  gen.n = cell.n;
  gen.total_util = cell.total_util;
  gen.total_density = cell.total_density;
  gen.seed = cfg.seed;
  return gen;
}

std::string dump(const TaskSystem& system, Flavor flavor) {
  return serialize_taskset(to_taskset(system, flavor));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double median(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid]
                           : (values[mid - 1] + values[mid]) / 2.0;
}

// Runs `fp` and `cp` alternately `repeats` times and returns the median
// wall time of each in microseconds.
template <typename Fp, typename Cp>
std::pair<double, double> time_pair(std::size_t repeats, Fp&& fp, Cp&& cp) {
  using Clock = std::chrono::steady_clock;
  std::vector<double> fp_us;
  std::vector<double> cp_us;
  for (std::size_t r = 0; r < repeats; ++r) {
    auto start = Clock::now();
    fp();
    auto stop = Clock::now();
    fp_us.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
    start = Clock::now();
    cp();
    stop = Clock::now();
    cp_us.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
  }
  return {median(fp_us), median(cp_us)};
}

struct CellAccumulator {
  std::vector<double> fp;
  std::vector<double> cp;
  std::vector<double> ratio;
  CellResult result;

  void add(SampleRecord record, bool keep_raw) {
    fp.push_back(record.fp);
    cp.push_back(record.cp);
    ratio.push_back(record.ratio);
    if (record.cp_iterations > record.fp_iterations) {
      ++result.dominance_violations;
    }
    if (!record.schedulable) ++result.unschedulable;
    if (keep_raw) result.raw.push_back(record);
  }

  CellResult finish() {
    result.fp = aggregate(fp);
    result.cp = aggregate(cp);
    result.ratio = aggregate(ratio);
    return std::move(result);
  }
};

SampleRecord fp_sample(const ExperimentConfig& cfg, const TaskSystem& system,
                       CellAccumulator& acc) {
  const std::size_t level = system.size();
  auto run = [&](Solver solver) {
    return fp_analyze_level(system, level, solver, Reduction::kImproved,
                            TraceMode::kCountOnly);
  };
  LevelVerdict fp = run(Solver::kFixedPoint);
  LevelVerdict cp = run(Solver::kCuttingPlane);
  if (fp.response_time != cp.response_time) {
    auto show = [](const LevelVerdict& v) {
      return v.response_time ? v.response_time->get_str() : "unschedulable";
    };
    throw InconsistencyError("FP level " + std::to_string(level) +
                                 ": fixed-point says " + show(fp) +
                                 ", cutting-plane says " + show(cp),
                             dump(system, Flavor::kFp));
  }

  SampleRecord record;
  record.fp_iterations = fp.trace.iterations;
  record.cp_iterations = cp.trace.iterations;
  record.schedulable = fp.schedulable();
  if (system.utilization(level) <= 1) {
    const KernelInstance inst = reduce_fp(system, level, Reduction::kImproved);
    const Int bound = iteration_bound(inst);
    if (bound < record.fp_iterations) ++acc.result.bound_violations;
    if (bound < record.cp_iterations) ++acc.result.bound_violations;
    record.predicted_steps = predicted_steps(inst).get_d();
  }

  if (measures_time(cfg.experiment)) {
    std::tie(record.fp, record.cp) = time_pair(
        cfg.timing_repeats, [&] { fp = run(Solver::kFixedPoint); },
        [&] { cp = run(Solver::kCuttingPlane); });
  } else {
    record.fp = static_cast<double>(record.fp_iterations);
    record.cp = static_cast<double>(record.cp_iterations);
  }
  record.ratio = sample_ratio(record.fp, record.cp);
  return record;
}

SampleRecord edf_sample(const ExperimentConfig& cfg, const TaskSystem& system,
                        CellAccumulator& acc) {
  auto run = [&](Solver solver) {
    return edf_test(system, solver, EdfBound::utilization(), Reduction::kBasic,
                    TraceMode::kCountOnly);
  };
  EdfResult fp = run(Solver::kFixedPoint);
  EdfResult cp = run(Solver::kCuttingPlane);
  if (fp.schedulable != cp.schedulable || fp.miss_time != cp.miss_time) {
    auto show = [](const EdfResult& r) {
      return r.miss_time ? "miss at " + r.miss_time->get_str()
                         : std::string(r.schedulable ? "schedulable"
                                                     : "overloaded");
    };
    throw InconsistencyError("EDF test: fixed-point says " + show(fp) +
                                 ", cutting-plane says " + show(cp),
                             dump(system, Flavor::kEdf));
  }

  SampleRecord record;
  record.fp_iterations = fp.iterations();
  record.cp_iterations = cp.iterations();
  record.schedulable = fp.schedulable;
  Rational predicted(0);
  for (std::size_t b = 0; b < fp.branches.size(); ++b) {
    const KernelInstance inst = reduce_edf_subproblem(
        system, fp.branches[b].interval, Reduction::kBasic);
    const Int bound = iteration_bound(inst);
    if (bound < fp.branches[b].result.trace.iterations) {
      ++acc.result.bound_violations;
    }
    if (b < cp.branches.size() &&
        bound < cp.branches[b].result.trace.iterations) {
      ++acc.result.bound_violations;
    }
    predicted += predicted_steps(inst);
  }
  record.predicted_steps = predicted.get_d();

  if (measures_time(cfg.experiment)) {
    std::tie(record.fp, record.cp) = time_pair(
        cfg.timing_repeats, [&] { fp = run(Solver::kFixedPoint); },
        [&] { cp = run(Solver::kCuttingPlane); });
  } else {
    record.fp = static_cast<double>(record.fp_iterations);
    record.cp = static_cast<double>(record.cp_iterations);
  }
  record.ratio = sample_ratio(record.fp, record.cp);
  return record;
}

ExperimentResult run_cells(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult result;
  result.config = cfg;
  const bool fp_systems = uses_fp_systems(cfg.experiment);
  for (const Cell& cell : cfg.cells) {
    const GenConfig gen = gen_config(cfg, cell);
    CellAccumulator acc;
    acc.result.cell = cell;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      Rng rng = sample_rng(cfg, cell, s);
      const TaskSystem system = generate(gen, rng);
      SampleRecord record = fp_systems ? fp_sample(cfg, system, acc)
                                       : edf_sample(cfg, system, acc);
      record.index = s;
      acc.add(record, cfg.keep_raw);
    }
    result.cells.push_back(acc.finish());
  }
  return result;
}

}  // namespace

RunStats aggregate(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("aggregate: empty sample");
  }
  RunStats stats;
  stats.count = samples.size();
  stats.min = *std::min_element(samples.begin(), samples.end());
  stats.max = *std::max_element(samples.begin(), samples.end());
  double sum = 0.0;
  for (double x : samples) sum += x;
  stats.mean = sum / static_cast<double>(samples.size());
  double squares = 0.0;
  for (double x : samples) squares += (x - stats.mean) * (x - stats.mean);
  stats.variance = squares / static_cast<double>(samples.size());
  // Rounding can leave the mean a hair outside [min, max].
  stats.mean = std::clamp(stats.mean, stats.min, stats.max);
  return stats;
}

Rational harmonic_mean_periods(const TaskSystem& system) {
  if (system.empty()) {
    throw std::invalid_argument("harmonic mean of an empty system");
  }
  FractionSum inverse;
  for (const Task& task : system.tasks()) inverse.add(1, Int(task.period));
  Rational mean(Int(system.size()) * inverse.denominator(),
                inverse.numerator());
  mean.canonicalize();
  return mean;
}

Rational predicted_steps(const KernelInstance& inst) {
  if (inst.lower() > inst.upper()) return Rational(0);
  FractionSum inverse;
  for (std::size_t j = 0; j < inst.size(); ++j) inverse.add(1, inst.period(j));
  Rational steps(inverse.numerator() * (inst.upper() - inst.lower()),
                 inverse.denominator());
  steps.canonicalize();
  return steps;
}

Int iteration_bound(const KernelInstance& inst) {
  if (inst.lower() > inst.upper()) return 0;
  const Int width = inst.upper() - inst.lower();
  Int bound = 2;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    bound += ceil_div(width, inst.period(j));
  }
  return bound;
}

const char* experiment_name(Experiment experiment) {
  switch (experiment) {
    case Experiment::kI:
      return "I";
    case Experiment::kII:
      return "II";
    case Experiment::kIII:
      return "III";
    case Experiment::kIV:
      return "IV";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::kI, Experiment::kII, Experiment::kIII,
                       Experiment::kIV}) {
    if (name == experiment_name(e)) return e;
  }
  return std::nullopt;
}

bool uses_fp_systems(Experiment experiment) {
  return experiment == Experiment::kI || experiment == Experiment::kII;
}

bool measures_time(Experiment experiment) {
  return experiment == Experiment::kII || experiment == Experiment::kIV;
}

ExperimentConfig default_config(Experiment experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (uses_fp_systems(experiment)) {
    for (std::size_t n : {25, 50, 75}) {
      for (double u : {0.7, 0.8, 0.9}) cfg.cells.push_back({n, u, 0.0});
    }
  } else {
    for (double u : {0.7, 0.8, 0.9}) cfg.cells.push_back({25, u, 1.5});
    for (double d : {1.25, 1.75}) cfg.cells.push_back({25, 0.9, d});
    for (std::size_t n : {50, 75}) cfg.cells.push_back({n, 0.9, 1.5});
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.samples == 0) {
    throw std::invalid_argument("experiment needs at least one sample per cell");
  }
  if (cfg.cells.empty()) throw std::invalid_argument("experiment has no cells");
  if (measures_time(cfg.experiment) && cfg.timing_repeats == 0) {
    throw std::invalid_argument("timing needs at least one repeat");
  }
  for (const Cell& cell : cfg.cells) validate(gen_config(cfg, cell));
}

std::size_t ExperimentResult::dominance_violations() const {
  std::size_t total = 0;
  for (const CellResult& cell : cells) total += cell.dominance_violations;
  return total;
}

std::size_t ExperimentResult::bound_violations() const {
  std::size_t total = 0;
  for (const CellResult& cell : cells) total += cell.bound_violations;
  return total;
}

double sample_ratio(double fp, double cp) {
  if (cp == 0.0) return fp == 0.0 ? 1.0 : fp;
  return fp / cp;
}

ExperimentResult run_fp_experiment(const ExperimentConfig& cfg) {
  if (!uses_fp_systems(cfg.experiment)) {
    throw std::invalid_argument("run_fp_experiment needs experiment I or II");
  }
  return run_cells(cfg);
}

ExperimentResult run_edf_experiment(const ExperimentConfig& cfg) {
  if (uses_fp_systems(cfg.experiment)) {
    throw std::invalid_argument("run_edf_experiment needs experiment III or IV");
  }
  return run_cells(cfg);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return uses_fp_systems(cfg.experiment) ? run_fp_experiment(cfg)
                                         : run_edf_experiment(cfg);
}

std::string to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "experiment,n,total_util,total_density,algo,min,max,mean,variance,"
         "samples,seed\n";
  const ExperimentConfig& cfg = result.config;
  const bool edf = !uses_fp_systems(cfg.experiment);
  for (const CellResult& cell : result.cells) {
    const std::pair<const char*, const RunStats*> rows[] = {
        {"fp", &cell.fp}, {"cp", &cell.cp}, {"ratio", &cell.ratio}};
    for (const auto& [algo, stats] : rows) {
      out << experiment_name(cfg.experiment) << ',' << cell.cell.n << ','
          << fmt(cell.cell.total_util) << ','
          << (edf ? fmt(cell.cell.total_density) : "") << ',' << algo << ','
          << fmt(stats->min) << ',' << fmt(stats->max) << ','
          << fmt(stats->mean) << ',' << fmt(stats->variance) << ','
          << stats->count << ',' << cfg.seed << '\n';
    }
  }
  return out.str();
}

std::string to_jsonl(const ExperimentResult& result) {
  std::ostringstream out;
  const ExperimentConfig& cfg = result.config;
  for (const CellResult& cell : result.cells) {
    for (const SampleRecord& r : cell.raw) {
      out << "{\"experiment\":\"" << experiment_name(cfg.experiment)
          << "\",\"n\":" << cell.cell.n
          << ",\"total_util\":" << fmt(cell.cell.total_util)
          << ",\"total_density\":" << fmt(cell.cell.total_density)
          << ",\"sample\":" << r.index << ",\"fp\":" << fmt(r.fp)
          << ",\"cp\":" << fmt(r.cp) << ",\"ratio\":" << fmt(r.ratio)
          << ",\"fp_iterations\":" << r.fp_iterations
          << ",\"cp_iterations\":" << r.cp_iterations
          << ",\"schedulable\":" << (r.schedulable ? "true" : "false")
          << ",\"predicted_steps\":" << fmt(r.predicted_steps) << "}\n";
    }
  }
  return out.str();
}

std::string summary_table(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  const bool edf = !uses_fp_systems(cfg.experiment);
  const char* fp_label = edf ? "QPA" : "RTA";
  std::ostringstream out;
  out << "Experiment " << experiment_name(cfg.experiment) << " ("
      << (measures_time(cfg.experiment) ? "time in us" : "iterations")
      << "), " << cfg.samples << " systems per cell, seed " << cfg.seed
      << "\n";
  char line[256];
  std::snprintf(line, sizeof line,
                "%4s %5s %5s | %-8s %18s %10s %12s | %18s %10s %12s | %6s\n",
                "n", "U", edf ? "dens" : "", "algo", "(min, max)", "mean",
                "variance", "(min, max)", "mean", "variance", "ratio");
  out << line;
  for (const CellResult& cell : result.cells) {
    const std::string minmax_fp =
        "(" + fmt(cell.fp.min) + ", " + fmt(cell.fp.max) + ")";
    const std::string minmax_cp =
        "(" + fmt(cell.cp.min) + ", " + fmt(cell.cp.max) + ")";
    std::snprintf(line, sizeof line,
                  "%4zu %5.2f %5s | %-8s %18s %10.2f %12.2f | %18s %10.2f "
                  "%12.2f | %6.2f\n",
                  cell.cell.n, cell.cell.total_util,
                  edf ? fmt(cell.cell.total_density).c_str() : "",
                  (std::string(fp_label) + "/CP").c_str(), minmax_fp.c_str(),
                  cell.fp.mean, cell.fp.variance, minmax_cp.c_str(),
                  cell.cp.mean, cell.cp.variance, cell.ratio.mean);
    out << line;
  }
  const std::size_t dominance = result.dominance_violations();
  const std::size_t bounds = result.bound_violations();
  if (dominance || bounds) {
    out << "dominance violations: " << dominance
        << ", iteration-bound violations: " << bounds << "\n";
  }
  return out.str();
}

}  // namespace schedkernel
