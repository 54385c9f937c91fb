#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <doctest.h>

// Minimal property-testing support: a seeded generator and a driver that
// reports the failing case index and seed so a failure can be replayed.
namespace qxtest {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 rng_;
};


// Runs body(gen) for `cases` independent cases, each with its own seed.
template <typename F>
void for_all(int cases, F&& body, std::uint64_t seed = 20240611) {
  for (int c = 0; c < cases; ++c) {
    std::uint64_t const case_seed = seed + 7919ULL * static_cast<std::uint64_t>(c);
    CAPTURE(c);
    CAPTURE(case_seed);
    Gen gen(case_seed);
    body(gen);
  }
}

}  // namespace qxtest
