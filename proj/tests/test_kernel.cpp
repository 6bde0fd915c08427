#include <gtest/gtest.h>

#include <stdexcept>

#include "oracles.hpp"
#include "schedkernel/kernel.hpp"
#include "schedkernel/taskgen.hpp"
#include "schedkernel/verify.hpp"

using namespace schedkernel;

namespace {

std::vector<Int> ints(std::initializer_list<long> values) {
  std::vector<Int> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

// Level 3 of the three-task example without its own term.
KernelInstance three_task_level(long lower) {
  return KernelInstance(ints({20, 10}), ints({40, 50}), ints({0, 0}), 33,
                        lower, 150);
}

std::vector<Int> bounds_of(const SolveTrace& trace) {
  std::vector<Int> out;
  for (const Rational& b : trace.bounds) {
    EXPECT_EQ(b.get_den(), 1);
    out.push_back(b.get_num());
  }
  return out;
}

}  // namespace

TEST(KernelInstance, RejectsBadInput) {
  EXPECT_THROW(KernelInstance(ints({1}), ints({1, 2}), ints({0}), 0, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(KernelInstance(ints({0}), ints({2}), ints({0}), 0, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(KernelInstance(ints({1}), ints({0}), ints({0}), 0, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(
      KernelInstance(ints({2, 2}), ints({3, 3}), ints({0, 0}), 0, 0, 1),
      std::invalid_argument);
}

TEST(KernelInstance, AcceptsFullUtilization) {
  const KernelInstance inst(ints({1, 1}), ints({2, 2}), ints({0, 0}), 0, 0, 5);
  EXPECT_EQ(inst.total_utilization(), 1);
  EXPECT_EQ(inst.utilization(0), Rational(1, 2));
}

TEST(Phi, EvaluatesStepFunction) {
  const KernelInstance inst = three_task_level(1);
  EXPECT_EQ(phi(inst, 110), 33 + 3 * 20 + 3 * 10);
  EXPECT_EQ(phi(inst, 143), 143);
  const KernelInstance shifted(ints({3}), ints({5}), ints({-7}), 1, 0, 10);
  EXPECT_EQ(phi(shifted, 0), 1 + ceil_div(-7, 5) * 3);
}

TEST(FpKern, ThreeTaskExampleFromTwenty) {
  const SolveResult r = solve_fp_kern(three_task_level(20));
  ASSERT_TRUE(r.outcome.is_feasible());
  EXPECT_EQ(r.outcome.value(), 143);
  EXPECT_EQ(r.trace.iterations, 5u);
  EXPECT_EQ(bounds_of(r.trace), ints({63, 93, 113, 123, 143}));
}

TEST(CpKern, ThreeTaskExampleBasicReduction) {
  const KernelInstance inst(ints({20, 10, 33}), ints({40, 50, 150}),
                            ints({0, 0, 0}), 0, 1, 150);
  const SolveResult r = solve_cp_kern(inst);
  ASSERT_TRUE(r.outcome.is_feasible());
  EXPECT_EQ(r.outcome.value(), 143);
  EXPECT_EQ(r.trace.iterations, 3u);
  EXPECT_EQ(bounds_of(r.trace), ints({110, 126, 143}));
}

TEST(Solvers, EmptyRangeIsInfeasibleWithoutWork) {
  const KernelInstance inst = three_task_level(1).with_range(5, 4);
  for (Solver s : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
    const SolveResult r = solve(inst, s);
    EXPECT_FALSE(r.outcome.is_feasible());
    EXPECT_EQ(r.trace.iterations, 0u);
  }
  EXPECT_FALSE(solve_oracle(inst).is_feasible());
}

TEST(Solvers, NoTasksMeansConstantFunction) {
  const KernelInstance feasible({}, {}, {}, 5, 2, 10);
  const KernelInstance below({}, {}, {}, 1, 3, 10);
  const KernelInstance beyond({}, {}, {}, 12, 2, 10);
  for (Solver s : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
    EXPECT_EQ(solve(feasible, s).outcome, SolverOutcome::feasible(5));
    EXPECT_EQ(solve(below, s).outcome, SolverOutcome::feasible(3));
    EXPECT_FALSE(solve(beyond, s).outcome.is_feasible());
  }
}

TEST(CpKern, FullUtilizationWithPositiveLoadIsInfeasible) {
  // phi(t) = 2 * ceil(t / 2) + 1 > t everywhere.
  const KernelInstance inst(ints({2}), ints({2}), ints({0}), 1, 0, 1000);
  const SolveResult r = solve_cp_kern(inst);
  EXPECT_FALSE(r.outcome.is_feasible());
  EXPECT_EQ(r.trace.iterations, 0u);
  EXPECT_FALSE(solve_fp_kern(inst).outcome.is_feasible());
}

TEST(CpKern, FullUtilizationCanStillBeFeasible) {
  // phi(t) = ceil((t - 3) / 2) + ceil(t / 2) - 1 <= t holds at t = 0.
  const KernelInstance inst(ints({1, 1}), ints({2, 2}), ints({-3, 0}), -1, 0,
                            50);
  EXPECT_EQ(solve_cp_kern(inst).outcome, SolverOutcome::feasible(0));
  EXPECT_EQ(solve_fp_kern(inst).outcome, SolverOutcome::feasible(0));
}

TEST(Oracle, BudgetGuard) {
  const KernelInstance inst = three_task_level(0).with_range(0, 100);
  EXPECT_THROW(solve_oracle(inst, 100), OracleBudgetExceeded);
  EXPECT_FALSE(solve_oracle(inst, 101).is_feasible());
  EXPECT_EQ(solve_oracle(inst.with_range(0, 150), 151),
            SolverOutcome::feasible(143));
}

TEST(Oracle, HugeMagnitudesUseExactPath) {
  const KernelInstance small(ints({3, 2}), ints({7, 9}), ints({1, -4}), 2, 0,
                             60);
  // Translating t, every offset and the constant by a multiple of both
  // periods translates the answer.
  const Int shift = (Int(1) << 60) * 63;
  const KernelInstance huge(ints({3, 2}), ints({7, 9}),
                            {Int(1) - shift, Int(-4) - shift}, Int(2) + shift,
                            shift, shift + 60);
  const auto expected = oracle::scan(small);
  ASSERT_TRUE(expected.has_value());
  EXPECT_EQ(solve_oracle(small), SolverOutcome::feasible(*expected));
  EXPECT_EQ(solve_oracle(huge), SolverOutcome::feasible(*expected + shift));
  EXPECT_EQ(solve_cp_kern(huge).outcome, solve_oracle(huge));
  EXPECT_EQ(solve_fp_kern(huge).outcome, solve_oracle(huge));
}

// Property: the two solvers and the oracle agree, and the cutting-plane
// method never needs more iterations or weaker bounds.
TEST(SolverProperties, AgreementAndDominance) {
  for (std::size_t i = 0; i < 3000; ++i) {
    const KernelInstance inst = verify_instance(99, i, 300);
    const SolveResult fp = solve_fp_kern(inst);
    const SolveResult cp = solve_cp_kern(inst);
    const auto expected = oracle::scan(inst);
    const SolverOutcome want = expected ? SolverOutcome::feasible(*expected)
                                        : SolverOutcome::infeasible();
    ASSERT_EQ(fp.outcome, want) << inst.describe();
    ASSERT_EQ(cp.outcome, want) << inst.describe();
    ASSERT_LE(cp.trace.iterations, fp.trace.iterations) << inst.describe();
    for (std::size_t k = 0; k < cp.trace.bounds.size(); ++k) {
      ASSERT_GE(cp.trace.bounds[k], fp.trace.bounds[k]) << inst.describe();
    }
    for (std::size_t k = 1; k < cp.trace.bounds.size(); ++k) {
      ASSERT_GE(cp.trace.bounds[k], cp.trace.bounds[k - 1]);
    }
  }
}

TEST(SolverProperties, CountOnlyModeKeepsCounts) {
  for (std::size_t i = 0; i < 500; ++i) {
    const KernelInstance inst = verify_instance(5, i, 100);
    for (Solver s : {Solver::kFixedPoint, Solver::kCuttingPlane}) {
      const SolveResult full = solve(inst, s);
      const SolveResult lean = solve(inst, s, TraceMode::kCountOnly);
      EXPECT_EQ(full.outcome, lean.outcome);
      EXPECT_EQ(full.trace.iterations, lean.trace.iterations);
      EXPECT_EQ(full.trace.bounds.size(), full.trace.iterations);
      EXPECT_TRUE(lean.trace.bounds.empty());
    }
  }
}
