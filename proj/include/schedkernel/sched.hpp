#pragma once

// FP and EDF schedulability via reductions to the kernel.
//
// FP, level i: least t in [1, D_i - J_i] with rbf_i(t) <= t. The response
// time is t + J_i. Solving it with the fixed-point solver is classic RTA.
//
// EDF: the system misses a deadline iff total utilization exceeds one or
// dbf(t) > t for some t in [min D^, L). The range is split into branches on
// which dbf has a fixed set of active tasks; flipping the sign of t turns
// each branch into a kernel instance. The fixed-point solver then performs
// the downward QPA iteration.

#include <cstddef>
#include <optional>
#include <vector>

#include "schedkernel/arith.hpp"
#include "schedkernel/demand.hpp"
#include "schedkernel/kernel.hpp"

namespace schedkernel {

enum class Reduction {
  kBasic,     // search from the trivial lower end
  kImproved,  // start from the utilization-based bound ceil(f(0))
};

const char* reduction_name(Reduction reduction);

// (level, C, T, J, 0, 1, D_level - J_level). Throws std::invalid_argument if
// D_level > T_level, or if the subsystem utilization exceeds one.
KernelInstance reduce_fp_basic(const TaskSystem& system, std::size_t level);

// Drops the task's own term, which is C_level on the whole range:
// (level - 1, C, T, J, C_level, max(C_level, ceil(f0)), D_level - J_level)
// with f0 = (C_level + sum_{j<level} J_j U_j) / (1 - sum_{j<level} U_j).
KernelInstance reduce_fp_improved(const TaskSystem& system, std::size_t level);

KernelInstance reduce_fp(const TaskSystem& system, std::size_t level,
                         Reduction reduction);

struct LevelVerdict {
  std::size_t level = 0;
  std::optional<Int> response_time;  // none: unschedulable at this level
  SolveTrace trace;                  // empty when decided by the load check

  bool schedulable() const { return response_time.has_value(); }
};

struct FpAnalysisResult {
  // Levels in priority order, up to and including the first unschedulable
  // one.
  std::vector<LevelVerdict> levels;

  bool schedulable() const;
  std::optional<std::size_t> first_unschedulable() const;
};

// A level whose cumulative utilization exceeds one is unschedulable without
// solving anything.
LevelVerdict fp_analyze_level(const TaskSystem& system, std::size_t level,
                              Solver solver, Reduction reduction,
                              TraceMode mode = TraceMode::kBounds);

FpAnalysisResult fp_analyze(const TaskSystem& system, Solver solver,
                            Reduction reduction,
                            TraceMode mode = TraceMode::kBounds);

// Half-open branch [lower, upper) on which dbf == dbf_k.
struct BranchInterval {
  std::size_t k = 0;
  Int lower;
  Int upper;

  bool operator==(const BranchInterval&) const = default;
};

struct BranchPlan {
  // Candidate branch range; both 0 when min D^ >= L.
  std::size_t k_first = 0;
  std::size_t k_last = 0;
  // Nonempty branches, k_last first.
  std::vector<BranchInterval> intervals;
};

// Requires EDF ordering (throws std::invalid_argument otherwise).
BranchPlan edf_branch_bounds(const TaskSystem& system, const Int& limit);

// (k, C, T, D^ - T, 1, -upper + 1, -lower); the improved variant raises the
// lower end to ceil(f0) with f0 = (1 + sum_{j<=k} (D^_j - T_j) U_j) /
// (1 - sum_{j<=k} U_j) when that utilization is below one.
KernelInstance reduce_edf_subproblem(const TaskSystem& system,
                                     const BranchInterval& interval,
                                     Reduction reduction);

class EdfBound {
 public:
  enum class Kind { kUtilization, kHyperperiod, kExplicit };

  static EdfBound utilization() { return EdfBound(Kind::kUtilization, 0); }
  static EdfBound hyperperiod() { return EdfBound(Kind::kHyperperiod, 0); }
  static EdfBound fixed(Int limit) {
    return EdfBound(Kind::kExplicit, std::move(limit));
  }

  Kind kind() const { return kind_; }
  const Int& limit() const { return limit_; }

 private:
  EdfBound(Kind kind, Int limit) : kind_(kind), limit_(std::move(limit)) {}

  Kind kind_;
  Int limit_;
};

// Exclusive right end L of the EDF search range. The utilization bound
// falls back to the hyperperiod bound at utilization exactly one. The
// hyperperiod bound is H + max(0, max_j (D^_j - T_j)).
Int edf_search_limit(const TaskSystem& system, const EdfBound& bound);

struct BranchSolve {
  BranchInterval interval;
  SolveResult result;
};

struct EdfResult {
  bool schedulable = true;
  // Set when utilization exceeds one; no witness is computed then.
  bool overloaded = false;
  // Largest deadline-miss time within the first branch (highest k) that has
  // one. It is not necessarily the largest miss over all branches.
  std::optional<Int> miss_time;
  Int limit;
  std::vector<BranchSolve> branches;  // in solve order

  std::size_t iterations() const;
};

// Sorts by D^ - T internally, so FP-ordered systems are accepted too.
EdfResult edf_test(const TaskSystem& system, Solver solver,
                   const EdfBound& bound,
                   Reduction reduction = Reduction::kBasic,
                   TraceMode mode = TraceMode::kBounds);

}  // namespace schedkernel
