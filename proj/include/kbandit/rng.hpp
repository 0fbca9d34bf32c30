#pragma once

#include <cstdint>

namespace kbandit {

// Counter-based random stream. Each draw hashes (key, counter) with the
// splitmix64 finalizer, so a stream is a pure function of its key and the
// number of values consumed. Streams derived via split() are statistically
// independent and reproducible regardless of thread scheduling, which is what
// makes multi-trial runs bit-identical across --threads settings.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key = 0) : key_(key) {}

  // Derives an independent child stream. Child identity depends only on the
  // parent key and the tag, never on how much the parent has been consumed.
  RngStream split(std::uint64_t tag) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Uniform on {0, ..., n-1}; n >= 1.
  int next_index(int n);

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare,
  // so the stream position after k draws is always 2k).
  double next_gaussian();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Builds the root key for one trial from (seed, role). Roles keep the
// learner's and the adversary's randomness on disjoint streams.
RngStream make_stream(std::uint64_t seed, std::uint64_t role);

}  // namespace kbandit
