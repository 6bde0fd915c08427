#include "schedkernel/verify.hpp"

#include <algorithm>
#include <stdexcept>

namespace schedkernel {

namespace {

constexpr std::size_t kKeptMismatches = 10;
constexpr std::int64_t kMaxTasks = 6;
constexpr std::int64_t kMaxPeriod = 50;
constexpr std::int64_t kValueRange = 50;

// Tasks whose utilizations add up to exactly one: U_j = share_j / total
// with T_j = total * scale_j.
void full_utilization_tasks(Rng& rng, std::int64_t n, std::vector<Int>& wcet,
                            std::vector<Int>& period) {
  const std::int64_t total = rng.uniform_int(n, 2 * kMaxPeriod);
  std::int64_t left = total;
  for (std::int64_t j = 0; j < n; ++j) {
    const std::int64_t share =
        j + 1 == n ? left : rng.uniform_int(1, left - (n - j - 1));
    left -= share;
    const std::int64_t scale = rng.uniform_int(1, 3);
    wcet.emplace_back(share * scale);
    period.emplace_back(total * scale);
  }
}

void partial_utilization_tasks(Rng& rng, std::int64_t n,
                               std::vector<Int>& wcet,
                               std::vector<Int>& period) {
  Rational room(1);
  for (std::int64_t j = 0; j < n; ++j) {
    const std::int64_t t = rng.uniform_int(1, kMaxPeriod);
    const Int most = floor(room * t);
    if (most < 1) continue;
    const std::int64_t c = rng.uniform_int(1, to_int64(most));
    wcet.emplace_back(c);
    period.emplace_back(t);
    Rational u(c, t);
    u.canonicalize();
    room -= u;
  }
}

}  // namespace

void validate(const VerifyConfig& cfg) {
  if (cfg.count < 1) {
    throw std::invalid_argument("verify needs at least one instance");
  }
  if (cfg.max_range < 0 || cfg.max_range > kMaxVerifyRange) {
    throw std::invalid_argument("--max-range must lie in [0, " +
                                std::to_string(kMaxVerifyRange) + "]");
  }
}

KernelInstance random_kernel_instance(Rng& rng, std::int64_t max_range) {
  const std::int64_t n = rng.uniform_int(0, kMaxTasks);
  std::vector<Int> wcet;
  std::vector<Int> period;
  if (n > 0 && rng.uniform_int(0, 7) == 0) {
    full_utilization_tasks(rng, n, wcet, period);
  } else {
    partial_utilization_tasks(rng, n, wcet, period);
  }
  std::vector<Int> offset;
  for (std::size_t j = 0; j < wcet.size(); ++j) {
    offset.emplace_back(rng.uniform_int(-kValueRange, kValueRange));
  }
  const Int constant(rng.uniform_int(-kValueRange, kValueRange));
  const std::int64_t lower = rng.uniform_int(-2 * kValueRange, 2 * kValueRange);
  std::int64_t width;
  if (rng.uniform_int(0, 15) == 0) {
    width = -rng.uniform_int(1, 10);
  } else if (rng.uniform_int(0, 1) == 0) {
    width = rng.uniform_int(0, std::min<std::int64_t>(max_range, 200));
  } else {
    width = rng.uniform_int(0, max_range);
  }
  return KernelInstance(std::move(wcet), std::move(period), std::move(offset),
                        constant, lower, lower + width);
}

KernelInstance verify_instance(std::uint64_t seed, std::size_t index,
                               std::int64_t max_range) {
  Rng rng = derive_rng(seed, {index});
  return random_kernel_instance(rng, max_range);
}

std::string Mismatch::to_string() const {
  return "instance " + std::to_string(index) + ": " + instance +
         "\n  fp: " + fixed_point.to_string() +
         "\n  cp: " + cutting_plane.to_string() +
         "\n  oracle: " + oracle.to_string();
}

VerifyReport run_verify(const VerifyConfig& cfg, const VerifySolvers& solvers) {
  validate(cfg);
  VerifyReport report;
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const KernelInstance inst = verify_instance(cfg.seed, i, cfg.max_range);
    Mismatch m;
    m.index = i;
    m.fixed_point = solvers.fixed_point(inst).outcome;
    m.cutting_plane = solvers.cutting_plane(inst).outcome;
    m.oracle = solvers.oracle(inst);
    ++report.checked;
    if (m.oracle.is_feasible()) ++report.feasible;
    if (m.fixed_point != m.oracle || m.cutting_plane != m.oracle) {
      ++report.mismatch_count;
      if (report.mismatches.size() < kKeptMismatches) {
        m.instance = inst.describe();
        report.mismatches.push_back(std::move(m));
      }
    }
  }
  return report;
}

}  // namespace schedkernel
