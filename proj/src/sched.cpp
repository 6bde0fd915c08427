#include "schedkernel/sched.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace schedkernel {

namespace {

struct KernelColumns {
  std::vector<Int> wcet;
  std::vector<Int> period;
  std::vector<Int> offset;
};

// First `count` tasks; offset_j = J_j (FP) or D^_j - T_j (EDF).
KernelColumns columns(const TaskSystem& system, std::size_t count, bool edf) {
  KernelColumns cols;
  cols.wcet.reserve(count);
  cols.period.reserve(count);
  cols.offset.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) {
    const Task& task = system.task(j);
    cols.wcet.emplace_back(task.wcet);
    cols.period.emplace_back(task.period);
    cols.offset.emplace_back(edf ? task.effective_deadline() - task.period
                                 : task.jitter);
  }
  return cols;
}

void check_fp_level(const TaskSystem& system, std::size_t level) {
  if (system.ordering() != Ordering::kPriority) {
    throw std::invalid_argument("FP analysis needs a priority-ordered system");
  }
  if (level < 1 || level > system.size()) {
    throw std::out_of_range("FP level out of range");
  }
  const Task& task = system.task(level);
  if (task.deadline > task.period) {
    throw std::invalid_argument("task " + std::to_string(level) +
                                " has an arbitrary deadline (D > T)");
  }
}

}  // namespace

const char* reduction_name(Reduction reduction) {
  return reduction == Reduction::kBasic ? "basic" : "improved";
}

KernelInstance reduce_fp_basic(const TaskSystem& system, std::size_t level) {
  check_fp_level(system, level);
  const Task& task = system.task(level);
  KernelColumns cols = columns(system, level, /*edf=*/false);
  return KernelInstance(std::move(cols.wcet), std::move(cols.period),
                        std::move(cols.offset), 0, 1, task.effective_deadline());
}

KernelInstance reduce_fp_improved(const TaskSystem& system, std::size_t level) {
  check_fp_level(system, level);
  const Task& task = system.task(level);
  KernelColumns cols = columns(system, level - 1, /*edf=*/false);

  const Int own(task.wcet);
  Int lower = own;
  // f0 = (C + sum J U) / (1 - sum U), both sums over the common
  // denominator prod T.
  FractionSum load;
  FractionSum jitter_load;
  for (std::size_t j = 0; j < cols.wcet.size(); ++j) {
    load.add(cols.wcet[j], cols.period[j]);
    jitter_load.add(cols.wcet[j] * cols.offset[j], cols.period[j]);
  }
  const Int& den = load.denominator();
  if (load.numerator() < den) {
    lower = std::max(lower, ceil_div(own * den + jitter_load.numerator(),
                                     den - load.numerator()));
  }
  return KernelInstance(std::move(cols.wcet), std::move(cols.period),
                        std::move(cols.offset), own, std::move(lower),
                        task.effective_deadline());
}

KernelInstance reduce_fp(const TaskSystem& system, std::size_t level,
                         Reduction reduction) {
  return reduction == Reduction::kBasic ? reduce_fp_basic(system, level)
                                        : reduce_fp_improved(system, level);
}

bool FpAnalysisResult::schedulable() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const LevelVerdict& v) { return v.schedulable(); });
}

std::optional<std::size_t> FpAnalysisResult::first_unschedulable() const {
  for (const LevelVerdict& v : levels) {
    if (!v.schedulable()) return v.level;
  }
  return std::nullopt;
}

LevelVerdict fp_analyze_level(const TaskSystem& system, std::size_t level,
                              Solver solver, Reduction reduction,
                              TraceMode mode) {
  check_fp_level(system, level);
  LevelVerdict verdict;
  verdict.level = level;
  // rbf(t) >= t * U > t for every t > 0 once the load exceeds one.
  if (system.utilization(level) > 1) return verdict;

  SolveResult result = solve(reduce_fp(system, level, reduction), solver, mode);
  verdict.trace = std::move(result.trace);
  if (result.outcome.is_feasible()) {
    verdict.response_time = result.outcome.value() + system.task(level).jitter;
  }
  return verdict;
}

FpAnalysisResult fp_analyze(const TaskSystem& system, Solver solver,
                            Reduction reduction, TraceMode mode) {
  FpAnalysisResult result;
  for (std::size_t level = 1; level <= system.size(); ++level) {
    result.levels.push_back(fp_analyze_level(system, level, solver, reduction, mode));
    if (!result.levels.back().schedulable()) break;
  }
  return result;
}

BranchPlan edf_branch_bounds(const TaskSystem& system, const Int& limit) {
  if (system.ordering() != Ordering::kDeadlineMinusPeriod) {
    throw std::invalid_argument("branching needs an EDF-ordered system");
  }
  BranchPlan plan;
  if (system.empty()) return plan;
  const Int min_deadline(system.min_effective_deadline());
  if (min_deadline >= limit) return plan;

  const std::size_t n = system.size();
  auto lag = [&](std::size_t i) {
    const Task& task = system.task(i);
    return Int(task.effective_deadline() - task.period);
  };

  std::size_t first = 1;
  while (first <= n - 1 && lag(first + 1) < min_deadline) ++first;
  std::size_t last = n;
  while (last >= 1 && lag(last) >= limit) --last;
  plan.k_first = first;
  plan.k_last = last;

  for (std::size_t k = last; k >= first && k >= 1; --k) {
    BranchInterval interval;
    interval.k = k;
    interval.lower = std::max(min_deadline, lag(k));
    interval.upper = k == n ? limit : std::min(limit, lag(k + 1));
    if (interval.lower < interval.upper) {
      plan.intervals.push_back(std::move(interval));
    }
  }
  return plan;
}

KernelInstance reduce_edf_subproblem(const TaskSystem& system,
                                     const BranchInterval& interval,
                                     Reduction reduction) {
  if (interval.k < 1 || interval.k > system.size()) {
    throw std::out_of_range("branch index out of range");
  }
  if (interval.lower >= interval.upper) {
    throw std::invalid_argument("empty branch interval");
  }
  KernelColumns cols = columns(system, interval.k, /*edf=*/true);
  Int lower = 1 - interval.upper;
  if (reduction == Reduction::kImproved) {
    FractionSum load;
    FractionSum lag_load;
    for (std::size_t j = 0; j < interval.k; ++j) {
      load.add(cols.wcet[j], cols.period[j]);
      lag_load.add(cols.wcet[j] * cols.offset[j], cols.period[j]);
    }
    const Int& den = load.denominator();
    if (load.numerator() < den) {
      lower = std::max(lower, ceil_div(den + lag_load.numerator(),
                                       den - load.numerator()));
    }
  }
  return KernelInstance(std::move(cols.wcet), std::move(cols.period),
                        std::move(cols.offset), 1, std::move(lower),
                        -interval.lower);
}

Int edf_search_limit(const TaskSystem& system, const EdfBound& bound) {
  switch (bound.kind()) {
    case EdfBound::Kind::kExplicit:
      return bound.limit();
    case EdfBound::Kind::kUtilization:
      if (system.utilization() < 1) return compute_Lb(system).limit;
      [[fallthrough]];
    case EdfBound::Kind::kHyperperiod: {
      Int max_lag = 0;
      for (const Task& task : system.tasks()) {
        max_lag = std::max(max_lag, Int(task.effective_deadline() - task.period));
      }
      return hyperperiod(system) + max_lag;
    }
  }
  throw std::logic_error("unknown EDF bound kind");
}

std::size_t EdfResult::iterations() const {
  std::size_t total = 0;
  for (const BranchSolve& branch : branches) {
    total += branch.result.trace.iterations;
  }
  return total;
}

EdfResult edf_test(const TaskSystem& input, Solver solver,
                   const EdfBound& bound, Reduction reduction,
                   TraceMode mode) {
  const TaskSystem system =
      input.ordering() == Ordering::kDeadlineMinusPeriod
          ? input
          : TaskSystem::edf(input.tasks());
  EdfResult result;
  if (system.empty()) return result;
  if (system.utilization() > 1) {
    result.schedulable = false;
    result.overloaded = true;
    return result;
  }
  result.limit = edf_search_limit(system, bound);
  const BranchPlan plan = edf_branch_bounds(system, result.limit);
  for (const BranchInterval& interval : plan.intervals) {
    BranchSolve branch{interval,
                       solve(reduce_edf_subproblem(system, interval, reduction),
                             solver, mode)};
    const bool found = branch.result.outcome.is_feasible();
    if (found) {
      result.schedulable = false;
      result.miss_time = -branch.result.outcome.value();
    }
    result.branches.push_back(std::move(branch));
    if (found) break;
  }
  return result;
}

}  // namespace schedkernel
