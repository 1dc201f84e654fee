#pragma once

#include <cstdint>
#include <random>

namespace vdslab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives a stream seed from (root, tag, i, j). Streams with distinct
// coordinates are independent for practical purposes, which keeps results
// identical whether work is fanned out to threads or run serially.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag,
                                 std::uint64_t i = 0, std::uint64_t j = 0) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s = h ^ (tag * 0xd1342543de82ef95ull);
  h = splitmix64(s);
  s = h ^ (i * 0xaf251af3b0f025b5ull);
  h = splitmix64(s);
  s = h ^ (j * 0x9e3779b97f4a7c15ull);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng derive(std::uint64_t root, std::uint64_t tag, std::uint64_t i = 0,
                    std::uint64_t j = 0) {
    return Rng(derive_seed(root, tag, i, j));
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }

  // inclusive bounds
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }

  std::uint64_t next() { return gen_(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace vdslab
