#pragma once

// Seeded synthetic task systems for the FP and EDF experiments.
//
// Utilizations are drawn uniformly from the simplex {u : sum u = total,
// 0 < u_j <= 1}; wcets are log-uniform on [1, 1000] and rounded up; periods
// are ceil(C / U). FP systems get implicit deadlines plus a fixed
// low-priority task (C = 100, T = D = 1e8). EDF systems get densities
// delta_j >= U_j summing to a target and deadlines floor(C / delta).

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "schedkernel/demand.hpp"

namespace schedkernel {

enum class Flavor { kFp, kEdf };

const char* flavor_name(Flavor flavor);

struct GenConfig {
  Flavor flavor = Flavor::kFp;
  std::size_t n = 25;
  double total_util = 0.9;
  double total_density = 1.5;  // EDF only
  std::int64_t wcet_min = 1;
  std::int64_t wcet_max = 1000;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for configurations that cannot be generated.
void validate(const GenConfig& cfg);

inline constexpr std::int64_t kChallengeWcet = 100;
inline constexpr std::int64_t kChallengePeriod = 100'000'000;

// Counter-based generator: output i of a stream is mix(key + (i + 1) * G)
// with the SplitMix64 finalizer, so a stream is fully determined by its key
// and does not depend on any platform RNG.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Independent stream identified by (seed, tags...).
Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

// n positive values, each at most `cap`, summing to `total`.
// Throws std::invalid_argument unless 0 < total < n * cap.
std::vector<double> gen_utilizations(std::size_t n, double total, Rng& rng,
                                     double cap = 1.0);

// Log-uniform on [lo, hi], rounded up.
std::int64_t gen_wcet(Rng& rng, std::int64_t lo, std::int64_t hi);

// n - 1 implicit-deadline tasks (rate-monotonic order) followed by the
// challenge task.
TaskSystem gen_fp_system(const GenConfig& cfg, Rng& rng);

// Constrained-deadline system, EDF ordered.
TaskSystem gen_edf_system(const GenConfig& cfg, Rng& rng);

TaskSystem generate(const GenConfig& cfg, Rng& rng);

}  // namespace schedkernel
