#include "kbandit/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kbandit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream RngStream::split(std::uint64_t tag) const {
  return RngStream(mix64(key_ + kGolden * (tag + 1)) ^ 0x5851f42d4c957f2dull);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + kGolden * counter_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RngStream::next_index(int n) {
  if (n < 1) throw std::invalid_argument("RngStream::next_index: n must be >= 1");
  int i = static_cast<int>(next_double() * n);
  return i < n ? i : n - 1;
}

double RngStream::next_gaussian() {
  // u1 is kept away from 0 so the log stays finite.
  double u1 = next_double();
  double u2 = next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream make_stream(std::uint64_t seed, std::uint64_t role) {
  return RngStream(mix64(seed + kGolden * (role + 0x51ull)));
}

}  // namespace kbandit
