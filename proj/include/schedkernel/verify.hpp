#pragma once

// Randomized differential testing: small kernel instances solved by the
// fixed-point solver, the cutting-plane solver and the linear-scan oracle.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "schedkernel/kernel.hpp"
#include "schedkernel/taskgen.hpp"

namespace schedkernel {

inline constexpr std::int64_t kMaxVerifyRange = 10'000'000;

struct VerifyConfig {
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  std::int64_t max_range = 10000;  // upper bound on b - a
};

// Throws std::invalid_argument unless count >= 1 and
// 0 <= max_range <= kMaxVerifyRange.
void validate(const VerifyConfig& cfg);

// Up to 6 tasks with periods in [1, 50] and total utilization <= 1 (about
// one in eight exactly 1), offsets and constant in [-50, 50], and
// 0 <= b - a <= max_range; about one in sixteen has a > b.
KernelInstance random_kernel_instance(Rng& rng, std::int64_t max_range);

// Instance `index` of the stream a verify run with `seed` checks.
KernelInstance verify_instance(std::uint64_t seed, std::size_t index,
                               std::int64_t max_range);

using SolverFn = std::function<SolveResult(const KernelInstance&)>;
using OracleFn = std::function<SolverOutcome(const KernelInstance&)>;

// Injectable so the harness itself can be tested against a broken solver.
struct VerifySolvers {
  SolverFn fixed_point = [](const KernelInstance& inst) {
    return solve_fp_kern(inst, TraceMode::kCountOnly);
  };
  SolverFn cutting_plane = [](const KernelInstance& inst) {
    return solve_cp_kern(inst, TraceMode::kCountOnly);
  };
  OracleFn oracle = [](const KernelInstance& inst) {
    return solve_oracle(inst);
  };
};

struct Mismatch {
  std::size_t index = 0;
  std::string instance;  // KernelInstance::describe()
  SolverOutcome fixed_point = SolverOutcome::infeasible();
  SolverOutcome cutting_plane = SolverOutcome::infeasible();
  SolverOutcome oracle = SolverOutcome::infeasible();

  std::string to_string() const;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t feasible = 0;
  std::size_t mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // the first few, for replay

  bool ok() const { return mismatch_count == 0; }
};

VerifyReport run_verify(const VerifyConfig& cfg,
                        const VerifySolvers& solvers = {});

}  // namespace schedkernel
