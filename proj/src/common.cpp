#include "til/common.hpp"
#include "til/rng.hpp"

#include <cstdlib>

namespace til {

int max_dimension() {
  if (const char* env = std::getenv("TIL_MAX_N")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 62) return static_cast<int>(v);
  }
  return 24;
}

void check_dimension(int n, int cap) {
  if (cap <= 0) cap = max_dimension();
  if (n < 1) throw DomainError("dimension must be >= 1, got " + std::to_string(n));
  if (n > cap)
    throw DimensionError("dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vec Rng::normal_vector(Eigen::Index m) {
  Vec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = gauss(engine);
  return v;
}

}  // namespace til
