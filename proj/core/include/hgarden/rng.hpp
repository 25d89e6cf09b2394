#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace hgarden {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Counter-based stream for one path: every draw is addressed by (step, domain, slot),
// so any piece of a path can be regenerated in isolation.
class PathStream {
 public:
  enum Domain : std::uint32_t { Grid = 0, Bridge = 1, Aux = 2 };

  PathStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

  PhiloxCounter raw(std::uint64_t step, std::uint32_t domain, std::uint32_t slot) const;
  // Two 53-bit uniforms in (0,1).
  std::pair<double, double> uniforms(std::uint64_t step, std::uint32_t domain, std::uint32_t slot) const;
  // Two independent standard normals (Box-Muller).
  std::pair<double, double> normals(std::uint64_t step, std::uint32_t domain, std::uint32_t slot) const;

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
};

// Sequential 32-bit words from the counters (step, domain, 0), (step, domain, 1), ...
// Satisfies UniformRandomBitGenerator, so standard distributions can consume it.
class CounterEngine {
 public:
  using result_type = std::uint32_t;
  CounterEngine(const PathStream& st, std::uint64_t step, std::uint32_t domain)
      : st_(st), step_(step), domain_(domain) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()() {
    if (idx_ == 4) {
      buf_ = st_.raw(step_, domain_, slot_++);
      idx_ = 0;
    }
    return buf_[idx_++];
  }

 private:
  const PathStream& st_;
  std::uint64_t step_;
  std::uint32_t domain_;
  std::uint32_t slot_ = 0;
  PhiloxCounter buf_{};
  int idx_ = 4;
};

// Deterministic 64-bit mix for deriving sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hgarden
