#include "schedkernel/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace schedkernel {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr int kMaxRejections = 10000;
// Periods above this are resampled; they only arise from vanishing
// utilizations.
constexpr double kMaxPeriod = 1e15;

// Uniform point of the simplex {v >= 0 : sum v = total} (UUniFast).
std::vector<double> uunifast(std::size_t n, double total, Rng& rng) {
  std::vector<double> values(n);
  double remaining = total;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double next =
        remaining * std::pow(rng.uniform(), 1.0 / static_cast<double>(n - i - 1));
    values[i] = remaining - next;
    remaining = next;
  }
  if (n > 0) values[n - 1] = remaining;
  return values;
}

// Moves the mass above each cap onto the components with slack, in
// proportion to their slack.
void clamp_to_caps(std::vector<double>& values, const std::vector<double>& caps) {
  double excess = 0.0;
  double slack = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > caps[i]) {
      excess += values[i] - caps[i];
      values[i] = caps[i];
    } else {
      slack += caps[i] - values[i];
    }
  }
  if (excess <= 0.0 || slack <= 0.0) return;
  const double share = std::min(1.0, excess / slack);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < caps[i]) values[i] += share * (caps[i] - values[i]);
  }
}

// Uniform on {v : sum v = total, 0 < v_i <= caps_i} by rejection; falls
// back to clamping if the acceptance rate is too low.
std::vector<double> sample_capped_simplex(double total,
                                          const std::vector<double>& caps,
                                          Rng& rng) {
  const std::size_t n = caps.size();
  std::vector<double> values;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    values = uunifast(n, total, rng);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = values[i] > 0.0 && values[i] <= caps[i];
    }
    if (ok) return values;
  }
  clamp_to_caps(values, caps);
  return values;
}

void check(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument("generator: " + message);
}

}  // namespace

const char* flavor_name(Flavor flavor) {
  return flavor == Flavor::kFp ? "fp" : "edf";
}

void validate(const GenConfig& cfg) {
  check(cfg.n >= 1, "n must be at least 1");
  check(cfg.wcet_min >= 1 && cfg.wcet_min <= cfg.wcet_max,
        "wcet range must satisfy 1 <= min <= max");
  check(std::isfinite(cfg.total_util) && cfg.total_util > 0.0,
        "total utilization must be positive");
  if (cfg.flavor == Flavor::kFp) {
    check(cfg.n == 1 || cfg.total_util < static_cast<double>(cfg.n - 1),
          "total utilization must be below the number of random tasks");
  } else {
    check(cfg.total_util < 1.0, "EDF total utilization must be below 1");
    check(std::isfinite(cfg.total_density) &&
              cfg.total_density >= cfg.total_util,
          "total density must be at least the total utilization");
    check(cfg.total_density < static_cast<double>(cfg.n),
          "total density must be below n");
  }
}

std::uint64_t Rng::next() {
  ++counter_;
  return splitmix(key_ + counter_ * kGolden);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % span);
}

Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t key = splitmix(seed);
  for (std::uint64_t tag : tags) key = splitmix(key ^ splitmix(tag + kGolden));
  return Rng(key);
}

std::vector<double> gen_utilizations(std::size_t n, double total, Rng& rng,
                                     double cap) {
  check(n >= 1, "need at least one utilization");
  check(cap > 0.0, "cap must be positive");
  check(total > 0.0 && total < static_cast<double>(n) * cap,
        "total must lie in (0, n * cap)");
  return sample_capped_simplex(total, std::vector<double>(n, cap), rng);
}

std::int64_t gen_wcet(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  const double x = std::exp(log_lo + rng.uniform() * (log_hi - log_lo));
  const auto c = static_cast<std::int64_t>(std::ceil(x));
  return std::clamp(c, lo, hi);
}

TaskSystem gen_fp_system(const GenConfig& cfg, Rng& rng) {
  validate(cfg);
  if (cfg.flavor != Flavor::kFp) {
    throw std::invalid_argument("gen_fp_system: config is not FP");
  }
  std::vector<Task> tasks;
  const std::size_t random_count = cfg.n - 1;
  while (random_count > 0) {
    tasks.clear();
    const std::vector<double> util =
        gen_utilizations(random_count, cfg.total_util, rng);
    bool ok = true;
    for (double u : util) {
      Task task;
      task.wcet = gen_wcet(rng, cfg.wcet_min, cfg.wcet_max);
      const double period = std::ceil(static_cast<double>(task.wcet) / u);
      if (!(period <= kMaxPeriod)) {
        ok = false;
        break;
      }
      task.period = static_cast<std::int64_t>(period);
      task.deadline = task.period;
      tasks.push_back(task);
    }
    if (ok) break;
  }
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const Task& lhs, const Task& rhs) {
                     return lhs.period < rhs.period;
                   });
  Task challenge;
  challenge.wcet = kChallengeWcet;
  challenge.period = kChallengePeriod;
  challenge.deadline = kChallengePeriod;
  tasks.push_back(challenge);
  return TaskSystem::fixed_priority(std::move(tasks));
}

TaskSystem gen_edf_system(const GenConfig& cfg, Rng& rng) {
  validate(cfg);
  if (cfg.flavor != Flavor::kEdf) {
    throw std::invalid_argument("gen_edf_system: config is not EDF");
  }
  while (true) {
    const std::vector<double> util = gen_utilizations(cfg.n, cfg.total_util, rng);
    std::vector<double> caps(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) caps[i] = 1.0 - util[i];
    const double extra = cfg.total_density - cfg.total_util;
    std::vector<double> density = util;
    if (extra > 0.0) {
      const std::vector<double> bump = sample_capped_simplex(extra, caps, rng);
      for (std::size_t i = 0; i < cfg.n; ++i) {
        density[i] = std::min(1.0, util[i] + bump[i]);
      }
    }

    std::vector<Task> tasks;
    bool ok = true;
    for (std::size_t i = 0; i < cfg.n && ok; ++i) {
      Task task;
      task.wcet = gen_wcet(rng, cfg.wcet_min, cfg.wcet_max);
      const double c = static_cast<double>(task.wcet);
      const double period = std::ceil(c / util[i]);
      if (!(period <= kMaxPeriod)) {
        ok = false;
        break;
      }
      task.period = static_cast<std::int64_t>(period);
      const auto deadline = static_cast<std::int64_t>(std::floor(c / density[i]));
      task.deadline = std::clamp(deadline, task.wcet, task.period);
      tasks.push_back(task);
    }
    if (ok) return TaskSystem::edf(std::move(tasks));
  }
}

TaskSystem generate(const GenConfig& cfg, Rng& rng) {
  return cfg.flavor == Flavor::kFp ? gen_fp_system(cfg, rng)
                                   : gen_edf_system(cfg, rng);
}

}  // namespace schedkernel
