#include "sdss/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdss::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kSaltMix = 0x8BB84B93962EACC9ull;

double to_unit(std::uint64_t x) {
  // 53 mantissa bits, shifted into the open interval (0, 1)
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double box_muller(double u1, double u2) {
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive(std::uint64_t key, std::uint64_t salt) {
  return mix64((key + kGolden) ^ mix64(salt + kSaltMix));
}

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t index,
                         StreamPurpose purpose) {
  return derive(derive(master_seed, index),
                static_cast<std::uint64_t>(purpose));
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::u01() { return to_unit(next_u64()); }

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * u01();
}

double CounterRng::normal() {
  const double u1 = u01();
  const double u2 = u01();
  return box_muller(u1, u2);
}

double CounterRng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

double normal_at(std::uint64_t key, std::uint64_t ordinal,
                 std::uint64_t channel) {
  const std::uint64_t sub = derive(derive(key, ordinal), channel);
  const double u1 = to_unit(mix64(sub + kGolden));
  const double u2 = to_unit(mix64(sub + 2 * kGolden));
  return box_muller(u1, u2);
}

}  // namespace sdss::rng
