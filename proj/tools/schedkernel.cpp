// schedkernel: generate task sets, run FP / EDF schedulability tests,
// benchmark the two solvers and cross-check them against brute force.
//
// Exit codes: 0 schedulable (or success), 1 unschedulable, 2 usage error,
// 3 internal inconsistency.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "schedkernel/bench.hpp"
#include "schedkernel/sched.hpp"
#include "schedkernel/taskgen.hpp"
#include "schedkernel/taskset_io.hpp"
#include "schedkernel/verify.hpp"

namespace sk = schedkernel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnschedulable = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconsistent = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("SCHEDKERNEL_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(env, &used);
    if (env[used] != '\0') throw std::invalid_argument(env);
    return value;
  } catch (const std::exception&) {
    throw UsageError(std::string("SCHEDKERNEL_SEED is not an integer: ") + env);
  }
}

sk::Solver parse_solver(const std::string& name) {
  return name == "fp" ? sk::Solver::kFixedPoint : sk::Solver::kCuttingPlane;
}

sk::Reduction parse_reduction(const std::string& name) {
  return name == "basic" ? sk::Reduction::kBasic : sk::Reduction::kImproved;
}

std::string join_bounds(const sk::SolveTrace& trace) {
  std::string out;
  for (const sk::Rational& bound : trace.bounds) {
    if (!out.empty()) out += ' ';
    out += sk::to_string(bound);
  }
  return out;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string flavor;
  std::size_t n = 25;
  double total_util = 0.9;
  double total_density = 1.5;
  std::size_t count = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_gen(const GenOptions& opt) {
  sk::GenConfig cfg;
  cfg.flavor = opt.flavor == "fp" ? sk::Flavor::kFp : sk::Flavor::kEdf;
  cfg.n = opt.n;
  cfg.total_util = opt.total_util;
  cfg.total_density = opt.total_density;
  cfg.seed = resolve_seed(opt.seed);
  try {
    sk::validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.count < 1) throw UsageError("--count must be at least 1");

  std::ostringstream label;
  label << "schedkernel gen flavor=" << opt.flavor << " n=" << cfg.n
        << " total_util=" << cfg.total_util;
  if (cfg.flavor == sk::Flavor::kEdf) {
    label << " total_density=" << cfg.total_density;
  }

  if (!opt.out.empty()) std::filesystem::create_directories(opt.out);
  for (std::size_t i = 0; i < opt.count; ++i) {
    sk::Rng rng = sk::derive_rng(cfg.seed, {i});
    sk::TaskSetFile file = sk::to_taskset(sk::generate(cfg, rng), cfg.flavor);
    file.seed = cfg.seed;
    file.generator = label.str() + " index=" + std::to_string(i);
    if (opt.out.empty()) {
      std::cout << sk::serialize_taskset(file);
    } else {
      const std::filesystem::path path =
          std::filesystem::path(opt.out) /
          (opt.flavor + "_" + std::to_string(cfg.seed) + "_" +
           std::to_string(i) + ".json");
      sk::write_taskset(path, file);
      std::cout << path.string() << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- fp

struct FpOptions {
  std::string file;
  std::string solver = "cp";
  std::string reduction = "basic";
  bool trace = false;
};

int cmd_fp(const FpOptions& opt) {
  const sk::TaskSetFile file = sk::read_taskset(opt.file);
  const sk::TaskSystem system = sk::TaskSystem::fixed_priority(file.tasks);
  const sk::FpAnalysisResult result = sk::fp_analyze(
      system, parse_solver(opt.solver), parse_reduction(opt.reduction));
  for (const sk::LevelVerdict& level : result.levels) {
    std::cout << "task " << level.level << ": ";
    if (level.response_time) {
      std::cout << "response time " << *level.response_time << "\n";
    } else {
      std::cout << "unschedulable\n";
    }
    if (opt.trace) {
      std::cout << "  iterations " << level.trace.iterations << ", bounds: "
                << join_bounds(level.trace) << "\n";
    }
  }
  if (const auto bad = result.first_unschedulable()) {
    std::cout << "Unschedulable at level " << *bad << "\n";
    return kExitUnschedulable;
  }
  std::cout << "Schedulable\n";
  return kExitOk;
}

// ---------------------------------------------------------------- edf

struct EdfOptions {
  std::string file;
  std::string solver = "cp";
  std::string bound = "lb";
  std::string reduction = "basic";
  bool trace = false;
};

sk::EdfBound parse_bound(const std::string& text) {
  if (text == "lb") return sk::EdfBound::utilization();
  if (text == "hyp") return sk::EdfBound::hyperperiod();
  sk::Int limit;
  if (text.empty() || limit.set_str(text, 10) != 0) {
    throw UsageError("--bound must be lb, hyp or an integer, got " + text);
  }
  return sk::EdfBound::fixed(limit);
}

int cmd_edf(const EdfOptions& opt) {
  const sk::EdfBound bound = parse_bound(opt.bound);
  const sk::TaskSetFile file = sk::read_taskset(opt.file);
  const sk::TaskSystem system = sk::TaskSystem::edf(file.tasks);
  const sk::EdfResult result =
      sk::edf_test(system, parse_solver(opt.solver), bound,
                   parse_reduction(opt.reduction));
  if (opt.trace && !result.overloaded) {
    std::cout << "search range [" << system.min_effective_deadline() << ", "
              << result.limit << ")\n";
    for (const sk::BranchSolve& branch : result.branches) {
      std::cout << "  branch k=" << branch.interval.k << " ["
                << branch.interval.lower << ", " << branch.interval.upper
                << "): iterations " << branch.result.trace.iterations
                << ", bounds: " << join_bounds(branch.result.trace) << "\n";
    }
  }
  if (result.overloaded) {
    std::cout << "Unschedulable: total utilization "
              << sk::to_string(system.utilization()) << " exceeds 1\n";
    return kExitUnschedulable;
  }
  if (result.miss_time) {
    std::cout << "deadline miss at " << *result.miss_time << "\n";
    return kExitUnschedulable;
  }
  std::cout << "Schedulable\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string experiment;
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t repeats = 3;
  std::string out;
  std::string raw;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_bench(const BenchOptions& opt) {
  const auto experiment = sk::parse_experiment(opt.experiment);
  if (!experiment) throw UsageError("unknown experiment " + opt.experiment);
  sk::ExperimentConfig cfg = sk::default_config(*experiment);
  cfg.samples = opt.samples;
  cfg.seed = resolve_seed(opt.seed);
  cfg.timing_repeats = opt.repeats;
  cfg.keep_raw = !opt.raw.empty();
  try {
    sk::validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  sk::ExperimentResult result;
  try {
    result = sk::run_experiment(cfg);
  } catch (const sk::InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << "\n" << e.system();
    return kExitInconsistent;
  }

  const std::string csv = sk::to_csv(result);
  if (opt.out.empty()) {
    std::cout << csv;
    std::cerr << sk::summary_table(result);
  } else {
    write_text(opt.out, csv);
    std::cout << sk::summary_table(result);
  }
  if (cfg.keep_raw) write_text(opt.raw, sk::to_jsonl(result));

  if (result.dominance_violations() > 0 || result.bound_violations() > 0) {
    std::cerr << "inconsistency: " << result.dominance_violations()
              << " dominance and " << result.bound_violations()
              << " iteration-bound violations\n";
    return kExitInconsistent;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::size_t count = 10000;
  std::optional<std::uint64_t> seed;
  std::int64_t max_range = 10000;
};

int cmd_verify(const VerifyOptions& opt) {
  sk::VerifyConfig cfg;
  cfg.count = opt.count;
  cfg.seed = resolve_seed(opt.seed);
  cfg.max_range = opt.max_range;
  try {
    sk::validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const sk::VerifyReport report = sk::run_verify(cfg);
  if (!report.ok()) {
    std::cout << report.mismatch_count << " of " << report.checked
              << " instances disagree (seed " << cfg.seed << ")\n";
    for (const sk::Mismatch& m : report.mismatches) {
      std::cout << m.to_string() << "\n";
    }
    return kExitInconsistent;
  }
  std::cout << "checked " << report.checked << " instances (" << report.feasible
            << " feasible, seed " << cfg.seed
            << "): fp, cp and oracle agree\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schedulability analysis with fixed-point and cutting-plane "
               "kernel solvers"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate random task sets");
  gen_cmd->add_option("--flavor", gen.flavor, "fp or edf")
      ->required()
      ->check(CLI::IsMember({"fp", "edf"}));
  gen_cmd->add_option("--n", gen.n, "Number of tasks")->capture_default_str();
  gen_cmd->add_option("--total-util", gen.total_util, "Target total utilization")
      ->capture_default_str();
  gen_cmd
      ->add_option("--total-density", gen.total_density,
                   "Target total density (edf)")
      ->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "Number of files")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Seed (default $SCHEDKERNEL_SEED or 0)");
  gen_cmd->add_option("--out", gen.out, "Output directory (default stdout)");

  FpOptions fp;
  CLI::App* fp_cmd = app.add_subcommand("fp", "Fixed-priority response times");
  fp_cmd->add_option("file", fp.file, "Task-set JSON")->required();
  fp_cmd->add_option("--solver", fp.solver)
      ->check(CLI::IsMember({"fp", "cp"}))
      ->capture_default_str();
  fp_cmd->add_option("--reduction", fp.reduction)
      ->check(CLI::IsMember({"basic", "improved"}))
      ->capture_default_str();
  fp_cmd->add_flag("--trace", fp.trace, "Print the bound of every iteration");

  EdfOptions edf;
  CLI::App* edf_cmd = app.add_subcommand("edf", "EDF processor-demand test");
  edf_cmd->add_option("file", edf.file, "Task-set JSON")->required();
  edf_cmd->add_option("--solver", edf.solver)
      ->check(CLI::IsMember({"fp", "cp"}))
      ->capture_default_str();
  edf_cmd->add_option("--bound", edf.bound, "lb, hyp or an explicit limit")
      ->capture_default_str();
  edf_cmd->add_option("--reduction", edf.reduction)
      ->check(CLI::IsMember({"basic", "improved"}))
      ->capture_default_str();
  edf_cmd->add_flag("--trace", edf.trace, "Print every branch and its bounds");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run an experiment");
  bench_cmd->add_option("--experiment", bench.experiment, "I, II, III or IV")
      ->required()
      ->check(CLI::IsMember({"I", "II", "III", "IV"}));
  bench_cmd->add_option("--samples", bench.samples, "Systems per cell")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed,
                        "Seed (default $SCHEDKERNEL_SEED or 0)");
  bench_cmd->add_option("--repeats", bench.repeats, "Timing repeats (median)")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV file (default stdout)");
  bench_cmd->add_option("--raw", bench.raw, "Per-sample JSONL file");

  VerifyOptions verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Cross-check solvers against brute force");
  verify_cmd->add_option("--count", verify.count)->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed,
                         "Seed (default $SCHEDKERNEL_SEED or 0)");
  verify_cmd->add_option("--max-range", verify.max_range, "Largest b - a")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*fp_cmd) return cmd_fp(fp);
    if (*edf_cmd) return cmd_edf(edf);
    if (*bench_cmd) return cmd_bench(bench);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sk::TaskSetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInconsistent;
  }
  return kExitUsage;
}
