#pragma once

#include <cstdint>

namespace momrec {

// xoshiro256** seeded through splitmix64, with Box-Muller normals.
// Self-contained so that seeded runs are reproducible across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();            // [0, 1)
  double normal();             // N(0, 1)
  int uniform_int(int n);      // [0, n)

  // Independent stream derived from (seed, stream), for per-trial RNGs.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace momrec
