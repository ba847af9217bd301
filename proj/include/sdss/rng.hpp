#pragma once

#include <cstdint>

namespace sdss::rng {

// Counter-based splittable streams. Every random quantity in the library is a
// pure function of (master seed, trajectory index, purpose, draw counter), so
// results never depend on evaluation order or thread scheduling.

enum class StreamPurpose : std::uint64_t {
  kDisturbance = 1,
  kMeasurementNoise = 2,
  kCeSampling = 3,
  kCandidateCi = 4,
  kVerify = 5,
  kGeneric = 6,
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive(std::uint64_t key, std::uint64_t salt);
std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t index,
                         StreamPurpose purpose);

/// Sequential generator over a keyed counter stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double u01();  // uniform in (0, 1)
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double stddev);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stateless standard-normal draw keyed by (stream key, ordinal, channel).
double normal_at(std::uint64_t key, std::uint64_t ordinal,
                 std::uint64_t channel);

}  // namespace sdss::rng
