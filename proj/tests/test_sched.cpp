#include <gtest/gtest.h>

#include <stdexcept>

#include "oracles.hpp"
#include "schedkernel/sched.hpp"
#include "schedkernel/taskgen.hpp"

using namespace schedkernel;

namespace {

Task task(std::int64_t c, std::int64_t t, std::int64_t d,
          std::int64_t j = 0) {
  Task out;
  out.wcet = c;
  out.period = t;
  out.deadline = d;
  out.jitter = j;
  return out;
}

TaskSystem three_task() {
  return TaskSystem::fixed_priority(
      {task(20, 40, 40), task(10, 50, 50), task(33, 150, 150)});
}

TaskSystem arbitrary_edf() {
  return TaskSystem::edf(
      {task(6, 17, 10), task(5, 13, 10), task(1, 20, 31)});
}

std::vector<Int> ints(std::initializer_list<long> values) {
  std::vector<Int> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

// Least t in [1, D - J] with rbf(t) <= t, plus J; none if there is none.
std::optional<Int> response_by_scan(const TaskSystem& system,
                                    std::size_t level) {
  const Task& own = system.task(level);
  for (std::int64_t t = 1; t <= own.effective_deadline(); ++t) {
    if (oracle::rbf_jobs(system, level, t) <= t) return Int(t + own.jitter);
  }
  return std::nullopt;
}

// Whether dbf(t) > t for some t in [min D^, limit).
bool has_miss_by_scan(const TaskSystem& system, std::int64_t limit) {
  for (std::int64_t t = system.min_effective_deadline(); t < limit; ++t) {
    if (oracle::dbf_jobs(system, t) > t) return true;
  }
  return false;
}

}  // namespace

TEST(FpReduction, BasicInstance) {
  const KernelInstance inst = reduce_fp_basic(three_task(), 3);
  EXPECT_EQ(inst.wcets(), ints({20, 10, 33}));
  EXPECT_EQ(inst.periods(), ints({40, 50, 150}));
  EXPECT_EQ(inst.offsets(), ints({0, 0, 0}));
  EXPECT_EQ(inst.constant(), 0);
  EXPECT_EQ(inst.lower(), 1);
  EXPECT_EQ(inst.upper(), 150);
}

TEST(FpReduction, ImprovedInstance) {
  // f0 = 33 / (1 - 1/2 - 1/5) = 110.
  const KernelInstance inst = reduce_fp_improved(three_task(), 3);
  EXPECT_EQ(inst.size(), 2u);
  EXPECT_EQ(inst.constant(), 33);
  EXPECT_EQ(inst.lower(), 110);
  EXPECT_EQ(inst.upper(), 150);
  const KernelInstance top = reduce_fp_improved(three_task(), 1);
  EXPECT_EQ(top.size(), 0u);
  EXPECT_EQ(top.lower(), 20);
}

TEST(FpReduction, RejectsBadLevels) {
  EXPECT_THROW(reduce_fp_basic(three_task(), 0), std::out_of_range);
  EXPECT_THROW(reduce_fp_basic(three_task(), 4), std::out_of_range);
  const TaskSystem late = TaskSystem::fixed_priority({task(1, 5, 6)});
  EXPECT_THROW(reduce_fp_basic(late, 1), std::invalid_argument);
  EXPECT_THROW(reduce_fp_basic(arbitrary_edf(), 1), std::invalid_argument);
}

TEST(FpAnalysis, ThreeTaskResponseTimes) {
  for (Solver s : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
    for (Reduction r : {Reduction::kBasic, Reduction::kImproved}) {
      const FpAnalysisResult result = fp_analyze(three_task(), s, r);
      ASSERT_TRUE(result.schedulable());
      ASSERT_EQ(result.levels.size(), 3u);
      EXPECT_EQ(result.levels[0].response_time, Int(20));
      EXPECT_EQ(result.levels[1].response_time, Int(30));
      EXPECT_EQ(result.levels[2].response_time, Int(143));
    }
  }
}

TEST(FpAnalysis, StopsAtFirstUnschedulableLevel) {
  const TaskSystem system =
      TaskSystem::fixed_priority({task(12, 20, 10), task(1, 30, 30)});
  const FpAnalysisResult result =
      fp_analyze(system, Solver::kCuttingPlane, Reduction::kBasic);
  EXPECT_FALSE(result.schedulable());
  EXPECT_EQ(result.first_unschedulable(), 1u);
  EXPECT_EQ(result.levels.size(), 1u);
}

TEST(FpAnalysis, OverloadDecidedWithoutSolving) {
  const TaskSystem system =
      TaskSystem::fixed_priority({task(3, 4, 4), task(2, 4, 4)});
  const LevelVerdict v = fp_analyze_level(system, 2, Solver::kCuttingPlane,
                                          Reduction::kImproved);
  EXPECT_FALSE(v.schedulable());
  EXPECT_EQ(v.trace.iterations, 0u);
}

TEST(FpAnalysis, MatchesScanWithJitter) {
  Rng rng(31);
  for (int s = 0; s < 400; ++s) {
    std::vector<Task> tasks;
    const std::int64_t n = rng.uniform_int(1, 5);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t t = rng.uniform_int(2, 30);
      const std::int64_t d = rng.uniform_int(1, t);
      tasks.push_back(task(rng.uniform_int(1, std::max<std::int64_t>(1, t / 3)),
                           t, d, rng.uniform_int(0, d - 1)));
    }
    const TaskSystem system = TaskSystem::fixed_priority(tasks);
    for (std::size_t level = 1; level <= system.size(); ++level) {
      const auto expected = response_by_scan(system, level);
      for (Solver solver : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
        for (Reduction red : {Reduction::kBasic, Reduction::kImproved}) {
          const LevelVerdict v = fp_analyze_level(system, level, solver, red);
          ASSERT_EQ(v.response_time, expected)
              << "level " << level << " sample " << s;
        }
      }
    }
  }
}

TEST(EdfBranching, ArbitraryDeadlineExample) {
  const BranchPlan plan = edf_branch_bounds(arbitrary_edf(), 13);
  EXPECT_EQ(plan.k_first, 2u);
  EXPECT_EQ(plan.k_last, 3u);
  ASSERT_EQ(plan.intervals.size(), 2u);
  EXPECT_EQ(plan.intervals[0], (BranchInterval{3, 11, 13}));
  EXPECT_EQ(plan.intervals[1], (BranchInterval{2, 10, 11}));

  const KernelInstance sub =
      reduce_edf_subproblem(arbitrary_edf(), plan.intervals[1], Reduction::kBasic);
  EXPECT_EQ(sub.wcets(), ints({6, 5}));
  EXPECT_EQ(sub.periods(), ints({17, 13}));
  EXPECT_EQ(sub.offsets(), ints({-7, -3}));
  EXPECT_EQ(sub.constant(), 1);
  EXPECT_EQ(sub.lower(), -10);
  EXPECT_EQ(sub.upper(), -10);
  EXPECT_EQ(phi(sub, -10), -10);
}

TEST(EdfBranching, IntervalsStayInsideSearchRange) {
  Rng rng(32);
  for (int s = 0; s < 500; ++s) {
    std::vector<Task> tasks;
    const std::int64_t n = rng.uniform_int(1, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t t = rng.uniform_int(1, 20);
      tasks.push_back(task(1, t, rng.uniform_int(1, 3 * t)));
    }
    const TaskSystem system = TaskSystem::edf(tasks);
    const Int limit = rng.uniform_int(1, 60);
    const BranchPlan plan = edf_branch_bounds(system, limit);
    Int covered = limit;
    for (const BranchInterval& b : plan.intervals) {
      ASSERT_LT(b.lower, b.upper);
      ASSERT_GE(b.lower, system.min_effective_deadline());
      ASSERT_LE(b.upper, limit);
      // Branches tile [min D^, limit) from the top down.
      ASSERT_EQ(b.upper, covered);
      covered = b.lower;
      for (Int t = b.lower; t < b.upper; ++t) {
        ASSERT_EQ(dbf_k(system, b.k, t), dbf(system, t));
      }
    }
    if (system.min_effective_deadline() < limit) {
      ASSERT_EQ(covered, system.min_effective_deadline());
    }
  }
}

TEST(EdfBranching, RequiresEdfOrdering) {
  EXPECT_THROW(edf_branch_bounds(three_task(), 100), std::invalid_argument);
}

TEST(EdfTest, ArbitraryDeadlineExampleMissesAtTen) {
  for (Solver s : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
    for (const EdfBound& bound :
         {EdfBound::fixed(13), EdfBound::utilization(), EdfBound::hyperperiod()}) {
      const EdfResult r = edf_test(arbitrary_edf(), s, bound);
      EXPECT_FALSE(r.schedulable);
      EXPECT_EQ(r.miss_time, Int(10));
    }
  }
}

TEST(EdfTest, SearchLimits) {
  EXPECT_EQ(edf_search_limit(arbitrary_edf(), EdfBound::utilization()), 15);
  // lcm(17, 13, 20) + 11.
  EXPECT_EQ(edf_search_limit(arbitrary_edf(), EdfBound::hyperperiod()),
            4420 + 11);
  const TaskSystem full = TaskSystem::edf({task(1, 2, 2), task(1, 2, 2)});
  EXPECT_EQ(edf_search_limit(full, EdfBound::utilization()), 2);
}

TEST(EdfTest, OverloadAndImplicitDeadlines) {
  const EdfResult over = edf_test(
      TaskSystem::edf({task(3, 4, 4), task(2, 4, 4)}), Solver::kCuttingPlane,
      EdfBound::utilization());
  EXPECT_FALSE(over.schedulable);
  EXPECT_TRUE(over.overloaded);
  const EdfResult fine = edf_test(
      TaskSystem::edf({task(2, 5, 5), task(3, 10, 10), task(4, 20, 20)}),
      Solver::kCuttingPlane, EdfBound::utilization());
  EXPECT_TRUE(fine.schedulable);
  const EdfResult full = edf_test(
      TaskSystem::edf({task(1, 2, 2), task(1, 2, 2)}), Solver::kFixedPoint,
      EdfBound::utilization());
  EXPECT_TRUE(full.schedulable);
}

TEST(EdfTest, AcceptsPriorityOrderedInput) {
  const TaskSystem listed = TaskSystem::fixed_priority(
      {task(1, 20, 31), task(5, 13, 10), task(6, 17, 10)});
  EXPECT_EQ(edf_test(listed, Solver::kCuttingPlane, EdfBound::fixed(13)).miss_time,
            Int(10));
}

TEST(EdfTest, MatchesExhaustiveScan) {
  Rng rng(33);
  for (int s = 0; s < 400; ++s) {
    std::vector<Task> tasks;
    const std::int64_t n = rng.uniform_int(1, 5);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t t = rng.uniform_int(2, 24);
      tasks.push_back(task(rng.uniform_int(1, std::max<std::int64_t>(1, t / 2)),
                           t, rng.uniform_int(1, 2 * t)));
    }
    const TaskSystem system = TaskSystem::edf(tasks);
    const EdfResult basic =
        edf_test(system, Solver::kCuttingPlane, EdfBound::hyperperiod());
    if (system.utilization() > 1) {
      ASSERT_TRUE(basic.overloaded);
      continue;
    }
    const Int h = edf_search_limit(system, EdfBound::hyperperiod());
    const bool miss = has_miss_by_scan(system, to_int64(h));
    ASSERT_EQ(basic.schedulable, !miss) << "sample " << s;
    for (Solver solver : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
      for (Reduction red : {Reduction::kBasic, Reduction::kImproved}) {
        for (const EdfBound& bound :
             {EdfBound::utilization(), EdfBound::hyperperiod()}) {
          const EdfResult r = edf_test(system, solver, bound, red);
          ASSERT_EQ(r.schedulable, !miss) << "sample " << s;
          if (r.miss_time) {
            ASSERT_GT(oracle::dbf_jobs(system, to_int64(*r.miss_time)),
                      to_int64(*r.miss_time));
          }
        }
      }
    }
    // Within the first branch that has a miss, the reported time is the
    // largest one.
    if (basic.miss_time) {
      const BranchInterval& where = basic.branches.back().interval;
      for (Int t = *basic.miss_time + 1; t < where.upper; ++t) {
        ASSERT_LE(dbf(system, t), t);
      }
    }
  }
}
