#pragma once

#include <cstdint>
#include <string_view>

namespace physioemo {

/// Stable 64-bit FNV-1a; unlike std::hash it is identical across builds.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Seed for a subcomponent, derived from (global seed, purpose, participant id).
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view purpose,
                          std::string_view participant_id = {});

/// splitmix64-seeded xoshiro256** generator.
///
/// The standard <random> distributions are implementation-defined, so the
/// uniform and normal draws are implemented here to keep outputs identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace physioemo
