#pragma once

// Sporadic task model, request/demand bound functions and the EDF interval
// bounds.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "schedkernel/arith.hpp"
#include "schedkernel/kernel.hpp"

namespace schedkernel {

struct Task {
  std::int64_t wcet = 1;      // C
  std::int64_t period = 1;    // T
  std::int64_t deadline = 1;  // D, relative
  std::int64_t jitter = 0;    // J, release jitter
  std::int64_t phase = 0;     // O, only used by eta()

  // D - J.
  std::int64_t effective_deadline() const { return deadline - jitter; }
  Rational utilization() const {
    Rational u{Int(wcet), Int(period)};
    u.canonicalize();
    return u;
  }

  bool operator==(const Task&) const = default;
};

// Throws std::invalid_argument unless C, T, D >= 1, J >= 0 and O >= 0.
void validate(const Task& task);

enum class Ordering {
  kPriority,          // FP: listed in decreasing priority
  kDeadlineMinusPeriod,  // EDF: nondecreasing D - J - T
};

class TaskSystem {
 public:
  // Tasks as listed, highest priority first.
  static TaskSystem fixed_priority(std::vector<Task> tasks);
  // Stable-sorts by (D - J) - T.
  static TaskSystem edf(std::vector<Task> tasks);

  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }
  Ordering ordering() const { return ordering_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  // 1-based, matching the usual "task i" / "subsystem [i]" numbering.
  const Task& task(std::size_t i) const { return tasks_.at(i - 1); }

  // Exact sum of C_j / T_j over the first `count` tasks (all by default).
  Rational utilization(std::optional<std::size_t> count = std::nullopt) const;
  std::int64_t min_effective_deadline() const;
  std::int64_t max_effective_deadline() const;

 private:
  TaskSystem(std::vector<Task> tasks, Ordering ordering);

  std::vector<Task> tasks_;
  Ordering ordering_;
};

// Request bound function of subsystem [level]:
//   sum_{j <= level} ceil((t + J_j) / T_j) * C_j.
Int rbf(const TaskSystem& system, std::size_t level, const Int& t);

// Demand bound function:
//   sum over j with t >= D^_j - T_j of floor((t + T_j - D^_j) / T_j) * C_j.
Int dbf(const TaskSystem& system, const Int& t);

// dbf restricted to the first k tasks without the guard; equals dbf on the
// k-th branch interval of an EDF-ordered system.
Int dbf_k(const TaskSystem& system, std::size_t k, const Int& t);

// lcm of all periods. Throws std::invalid_argument for an empty system.
Int hyperperiod(const TaskSystem& system);

// Least t in (0, hyperperiod] with rbf(t) <= t; none when utilization > 1.
std::optional<Int> compute_La(const TaskSystem& system, Solver solver);

struct UtilizationBound {
  Rational value;  // L_b
  Int limit;       // floor(L_b) + 1, exclusive right end of the search range
};

// max(max_j (D^_j - T_j), sum_j (T_j - D^_j) U_j / (1 - sum_j U_j)).
// Throws std::domain_error when total utilization is >= 1.
UtilizationBound compute_Lb(const TaskSystem& system);

// Number of jobs of `task` (phase O) whose release and absolute deadline
// both lie in [t1, t2]: |{k >= 0 : t1 <= O + kT, O + kT + D <= t2}|.
Int eta(const Task& task, const Int& t1, const Int& t2);

}  // namespace schedkernel
