#pragma once

// The kernel: find the least integer t in [lower, upper] with
//
//   phi(t) = sum_j ceil((t + offset_j) / period_j) * wcet_j + constant <= t.
//
// FP and EDF schedulability both reduce to it (see sched.hpp). Three solvers
// are provided: fixed-point iteration, a cutting-plane method whose LP
// relaxation is solved by a combinatorial max-scan, and a brute-force scan
// used as a test oracle.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "schedkernel/arith.hpp"

namespace schedkernel {

class KernelInstance {
 public:
  // Validates that all vectors have equal length, every wcet and period is
  // positive, and total utilization sum(wcet/period) <= 1 (exactly).
  // Throws std::invalid_argument otherwise.
  KernelInstance(std::vector<Int> wcet, std::vector<Int> period,
                 std::vector<Int> offset, Int constant, Int lower, Int upper);

  std::size_t size() const { return wcet_.size(); }
  const Int& wcet(std::size_t j) const { return wcet_[j]; }
  const Int& period(std::size_t j) const { return period_[j]; }
  const Int& offset(std::size_t j) const { return offset_[j]; }
  const Rational& utilization(std::size_t j) const { return util_[j]; }
  const Rational& total_utilization() const { return total_util_; }
  const Int& constant() const { return constant_; }
  const Int& lower() const { return lower_; }
  const Int& upper() const { return upper_; }

  const std::vector<Int>& wcets() const { return wcet_; }
  const std::vector<Int>& periods() const { return period_; }
  const std::vector<Int>& offsets() const { return offset_; }

  // Same data, different search range.
  KernelInstance with_range(Int lower, Int upper) const;

  std::string describe() const;

 private:
  std::vector<Int> wcet_;
  std::vector<Int> period_;
  std::vector<Int> offset_;
  std::vector<Rational> util_;
  Rational total_util_;
  Int constant_;
  Int lower_;
  Int upper_;
};

class SolverOutcome {
 public:
  static SolverOutcome feasible(Int t) { return SolverOutcome(std::move(t)); }
  static SolverOutcome infeasible() { return SolverOutcome(); }

  bool is_feasible() const { return value_.has_value(); }
  // Throws std::logic_error on an infeasible outcome.
  const Int& value() const;

  bool operator==(const SolverOutcome& other) const = default;

  std::string to_string() const;

 private:
  SolverOutcome() = default;
  explicit SolverOutcome(Int t) : value_(std::move(t)) {}

  std::optional<Int> value_;
};

enum class TraceMode {
  kBounds,     // keep every bound
  kCountOnly,  // iteration count only
};

// One entry per relaxation solve; the entries are dual bounds on the optimum
// and never decrease. `bounds` stays empty in TraceMode::kCountOnly.
struct SolveTrace {
  std::size_t iterations = 0;
  std::vector<Rational> bounds;
};

struct SolveResult {
  SolverOutcome outcome = SolverOutcome::infeasible();
  SolveTrace trace;
};

enum class Solver { kFixedPoint, kCuttingPlane };

const char* solver_name(Solver solver);

// Lower bounds on the integer variables x_j ~ ceil((t + offset_j)/period_j).
using LowerBounds = std::vector<Int>;

// ceil((lower + offset_j) / period_j) for every j.
LowerBounds initial_lower_bounds(const KernelInstance& inst);

Int phi(const KernelInstance& inst, const Int& t);

// Indices sorted by key period_j * xlb_j - offset_j, nonincreasing; ties are
// broken by ascending index.
std::vector<std::size_t> relaxation_order(const KernelInstance& inst,
                                          std::span<const Int> xlb);

// The map f(k): the first k indices of `order` sit at their lower bound, the
// rest are tight against t. Throws std::domain_error for k == 0 when total
// utilization is exactly one, and std::out_of_range for k > n.
Rational eval_f(const KernelInstance& inst, std::span<const Int> xlb,
                std::span<const std::size_t> order, std::size_t k);

struct RelaxationResult {
  bool feasible = false;
  Rational optimum;
  // Number of leading entries of `order` held at their lower bound in the
  // optimal solution; f(argmax) == optimum.
  std::size_t argmax = 0;
  std::vector<std::size_t> order;
};

// Optimum of the LP relaxation (bounds on t dropped) for the given lower
// bounds, computed as max f by a downward scan.
RelaxationResult solve_relaxation(const KernelInstance& inst,
                                  std::span<const Int> xlb);

// Fixed-point iteration t <- phi(t) from t = lower.
SolveResult solve_fp_kern(const KernelInstance& inst,
                          TraceMode mode = TraceMode::kBounds);

// Cutting planes on the integer program with the max-f relaxation solver.
SolveResult solve_cp_kern(const KernelInstance& inst,
                          TraceMode mode = TraceMode::kBounds);

SolveResult solve(const KernelInstance& inst, Solver solver,
                  TraceMode mode = TraceMode::kBounds);

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultOracleBudget = 10'000'000;

// Scans t = lower, lower + 1, ..., upper. Throws OracleBudgetExceeded when
// the range holds more than `budget` integers.
SolverOutcome solve_oracle(const KernelInstance& inst,
                           std::int64_t budget = kDefaultOracleBudget);

}  // namespace schedkernel
