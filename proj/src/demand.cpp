#include "schedkernel/demand.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace schedkernel {

void validate(const Task& task) {
  if (task.wcet < 1 || task.period < 1 || task.deadline < 1 ||
      task.jitter < 0 || task.phase < 0) {
    throw std::invalid_argument(
        "invalid task (C=" + std::to_string(task.wcet) +
        ", T=" + std::to_string(task.period) +
        ", D=" + std::to_string(task.deadline) +
        ", J=" + std::to_string(task.jitter) + ")");
  }
}

TaskSystem::TaskSystem(std::vector<Task> tasks, Ordering ordering)
    : tasks_(std::move(tasks)), ordering_(ordering) {
  for (const Task& task : tasks_) validate(task);
}

TaskSystem TaskSystem::fixed_priority(std::vector<Task> tasks) {
  return TaskSystem(std::move(tasks), Ordering::kPriority);
}

TaskSystem TaskSystem::edf(std::vector<Task> tasks) {
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const Task& lhs, const Task& rhs) {
                     return lhs.effective_deadline() - lhs.period <
                            rhs.effective_deadline() - rhs.period;
                   });
  return TaskSystem(std::move(tasks), Ordering::kDeadlineMinusPeriod);
}

Rational TaskSystem::utilization(std::optional<std::size_t> count) const {
  const std::size_t m = std::min(count.value_or(tasks_.size()), tasks_.size());
  Rational sum(0);
  for (std::size_t j = 0; j < m; ++j) sum += tasks_[j].utilization();
  sum.canonicalize();
  return sum;
}

std::int64_t TaskSystem::min_effective_deadline() const {
  if (tasks_.empty()) throw std::invalid_argument("empty task system");
  std::int64_t best = tasks_.front().effective_deadline();
  for (const Task& task : tasks_) best = std::min(best, task.effective_deadline());
  return best;
}

std::int64_t TaskSystem::max_effective_deadline() const {
  if (tasks_.empty()) throw std::invalid_argument("empty task system");
  std::int64_t best = tasks_.front().effective_deadline();
  for (const Task& task : tasks_) best = std::max(best, task.effective_deadline());
  return best;
}

Int rbf(const TaskSystem& system, std::size_t level, const Int& t) {
  if (level < 1 || level > system.size()) {
    throw std::out_of_range("rbf: level out of range");
  }
  Int sum = 0;
  for (std::size_t j = 1; j <= level; ++j) {
    const Task& task = system.task(j);
    sum += ceil_div(t + task.jitter, Int(task.period)) * task.wcet;
  }
  return sum;
}

Int dbf(const TaskSystem& system, const Int& t) {
  Int sum = 0;
  for (const Task& task : system.tasks()) {
    const std::int64_t lag = task.effective_deadline() - task.period;
    if (t < lag) continue;
    sum += floor_div(t - lag, Int(task.period)) * task.wcet;
  }
  return sum;
}

Int dbf_k(const TaskSystem& system, std::size_t k, const Int& t) {
  if (k < 1 || k > system.size()) {
    throw std::out_of_range("dbf_k: index out of range");
  }
  Int sum = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    const Task& task = system.task(j);
    const std::int64_t lag = task.effective_deadline() - task.period;
    sum += floor_div(t - lag, Int(task.period)) * task.wcet;
  }
  return sum;
}

Int hyperperiod(const TaskSystem& system) {
  if (system.empty()) throw std::invalid_argument("hyperperiod of empty system");
  Int result = 1;
  for (const Task& task : system.tasks()) {
    const Int period(task.period);
    mpz_lcm(result.get_mpz_t(), result.get_mpz_t(), period.get_mpz_t());
  }
  return result;
}

std::optional<Int> compute_La(const TaskSystem& system, Solver solver) {
  if (system.empty()) throw std::invalid_argument("L_a of empty system");
  if (system.utilization() > 1) return std::nullopt;
  std::vector<Int> wcet, period, jitter;
  for (const Task& task : system.tasks()) {
    wcet.emplace_back(task.wcet);
    period.emplace_back(task.period);
    jitter.emplace_back(task.jitter);
  }
  const KernelInstance inst(std::move(wcet), std::move(period),
                            std::move(jitter), 0, 1, hyperperiod(system));
  SolveResult result = solve(inst, solver);
  if (!result.outcome.is_feasible()) return std::nullopt;
  return result.outcome.value();
}

UtilizationBound compute_Lb(const TaskSystem& system) {
  if (system.empty()) throw std::invalid_argument("L_b of empty system");
  const Rational total = system.utilization();
  if (total >= 1) {
    throw std::domain_error("L_b requires total utilization below one, got " +
                            total.get_str());
  }
  std::int64_t max_lag = system.tasks().front().effective_deadline() -
                         system.tasks().front().period;
  Rational weighted(0);
  for (const Task& task : system.tasks()) {
    const std::int64_t lag = task.effective_deadline() - task.period;
    max_lag = std::max(max_lag, lag);
    weighted += Rational(-lag) * task.utilization();
  }
  Rational second = weighted / (1 - total);
  UtilizationBound bound;
  bound.value = std::max(Rational(max_lag), second);
  bound.limit = floor(bound.value) + 1;
  return bound;
}

Int eta(const Task& task, const Int& t1, const Int& t2) {
  const Int period(task.period);
  const Int phase(task.phase);
  const Int deadline(task.deadline);
  // Jobs k >= 0 with O + kT + D <= t2 number floor((t2 + T - D - O) / T)
  // when the first one fits.
  if (t1 <= phase) {
    if (phase + deadline > t2) return 0;
    return floor_div(t2 + period - deadline - phase, period);
  }
  if (t2 - t1 < deadline) return 0;
  return floor_div(t2 + period - deadline - phase, period) -
         ceil_div(t1 - phase, period);
}

}  // namespace schedkernel
