#pragma once

// Test-only reference implementations, written independently of the
// library's algorithms.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "schedkernel/demand.hpp"
#include "schedkernel/kernel.hpp"

namespace oracle {

using schedkernel::Int;
using schedkernel::KernelInstance;
using schedkernel::Rational;

inline Rational canon(Rational r) {
  r.canonicalize();
  return r;
}

// g(t) = constant + sum_j wcet_j * max(xlb_j, (t + offset_j) / period_j):
// the cheapest right-hand side for a given t in the LP relaxation.
inline Rational lp_load(const KernelInstance& inst,
                        const std::vector<Int>& xlb, const Rational& t) {
  Rational g(inst.constant());
  for (std::size_t j = 0; j < inst.size(); ++j) {
    Rational x = canon(Rational(t + inst.offset(j)) / inst.period(j));
    if (x < xlb[j]) x = xlb[j];
    g += inst.wcet(j) * x;
  }
  return canon(g);
}

// Least t with t >= g(t), found by walking the breakpoints of the concave
// piecewise-linear h(t) = t - g(t); none when h < 0 everywhere.
inline std::optional<Rational> lp_optimum(const KernelInstance& inst,
                                          const std::vector<Int>& xlb) {
  std::vector<Rational> points;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    points.emplace_back(inst.period(j) * xlb[j] - inst.offset(j));
  }
  if (points.empty()) return Rational(inst.constant());
  std::sort(points.begin(), points.end());
  auto h = [&](const Rational& t) { return canon(t - lp_load(inst, xlb, t)); };

  Rational prev = points.front();
  Rational h_prev = h(prev);
  // Left of the first breakpoint every x_j sits at its bound: slope one.
  if (h_prev >= 0) return canon(prev - h_prev);
  for (std::size_t k = 1; k < points.size(); ++k) {
    const Rational cur = points[k];
    const Rational h_cur = h(cur);
    if (h_cur >= 0) {
      // Linear on [prev, cur]; h(prev) < 0 <= h(cur).
      return canon(prev + (cur - prev) * (-h_prev) / (h_cur - h_prev));
    }
    prev = cur;
    h_prev = h_cur;
  }
  const Rational slope = 1 - inst.total_utilization();
  if (slope <= 0) return std::nullopt;
  return canon(prev + (-h_prev) / slope);
}

inline std::optional<Int> scan(const KernelInstance& inst) {
  for (Int t = inst.lower(); t <= inst.upper(); ++t) {
    Int v = inst.constant();
    for (std::size_t j = 0; j < inst.size(); ++j) {
      Int num = t + inst.offset(j);
      Int q;
      mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), inst.period(j).get_mpz_t());
      v += q * inst.wcet(j);
    }
    if (v <= t) return t;
  }
  return std::nullopt;
}

// dbf(t) by listing every job released at k*T (k >= 0) with absolute
// deadline k*T + D - J <= t.
inline std::int64_t dbf_jobs(const schedkernel::TaskSystem& system,
                             std::int64_t t) {
  std::int64_t demand = 0;
  for (const schedkernel::Task& task : system.tasks()) {
    for (std::int64_t k = 0; k * task.period + task.effective_deadline() <= t;
         ++k) {
      demand += task.wcet;
    }
  }
  return demand;
}

// rbf by counting releases in [-J, t): k * T - J < t.
inline std::int64_t rbf_jobs(const schedkernel::TaskSystem& system,
                             std::size_t level, std::int64_t t) {
  std::int64_t demand = 0;
  for (std::size_t i = 1; i <= level; ++i) {
    const schedkernel::Task& task = system.task(i);
    for (std::int64_t k = 0; k * task.period - task.jitter < t; ++k) {
      demand += task.wcet;
    }
  }
  return demand;
}

// |{k >= 0 : t1 <= O + kT, O + kT + D <= t2}| by enumeration.
inline std::int64_t eta_jobs(const schedkernel::Task& task, std::int64_t t1,
                             std::int64_t t2) {
  std::int64_t count = 0;
  for (std::int64_t r = task.phase; r <= t2; r += task.period) {
    if (r >= t1 && r + task.deadline <= t2) ++count;
  }
  return count;
}

}  // namespace oracle
