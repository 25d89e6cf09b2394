#include "hgarden/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hgarden {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  bits &= (std::uint64_t{1} << 53) - 1;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

PhiloxCounter PathStream::raw(std::uint64_t step, std::uint32_t domain, std::uint32_t slot) const {
  if (slot >= (1u << 28) || domain >= 16u || step > 0xFFFFFFFFull) {
    throw std::out_of_range("PathStream counter field out of range");
  }
  PhiloxCounter ctr{static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
                    static_cast<std::uint32_t>(step), (domain << 28) | slot};
  PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32_10(ctr, key);
}

std::pair<double, double> PathStream::uniforms(std::uint64_t step, std::uint32_t domain,
                                               std::uint32_t slot) const {
  PhiloxCounter r = raw(step, domain, slot);
  return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

std::pair<double, double> PathStream::normals(std::uint64_t step, std::uint32_t domain,
                                              std::uint32_t slot) const {
  auto [u1, u2] = uniforms(step, domain, slot);
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 6.283185307179586477 * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace hgarden
