#pragma once

#include "til/common.hpp"

#include <cstdint>
#include <random>

namespace til {

// splitmix64 finalizer over (seed, index); used to derive per-trajectory seeds
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double normal() { return gauss(engine); }
  double uniform() { return unif(engine); }
  Vec normal_vector(Eigen::Index m);
  std::uint64_t bits() { return engine(); }
  // uniform integer in [0, k)
  std::uint64_t below(std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(engine); }

  std::mt19937_64 engine;
  std::normal_distribution<double> gauss{0.0, 1.0};
  std::uniform_real_distribution<double> unif{0.0, 1.0};
};

}  // namespace til
