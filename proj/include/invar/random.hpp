#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "permutation.hpp"

namespace invar {

// std::uniform_int_distribution is not guaranteed to produce identical
// streams across standard libraries, and reproducible runs (seeds in test
// logs, the CLI --seed flag) matter here, so sampling is pinned down by hand.
inline std::uint64_t random_below(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

// splitmix64-style mixing, for deriving independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

template <typename T>
void shuffle_vector(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[random_below(rng, i)]);
}

inline SignedPerm random_signed_perm(std::mt19937_64& rng, int n, bool random_sign = false) {
  std::vector<int> images(n);
  for (int i = 0; i < n; ++i) images[i] = i;
  shuffle_vector(images, rng);
  int sign = random_sign && (rng() & 1) ? -1 : +1;
  return SignedPerm::from_images(images, sign);
}

// Random element of the group generated by gens, as a short word.
inline SignedPerm random_word(std::mt19937_64& rng, const std::vector<SignedPerm>& gens, int n,
                              int length = 12) {
  SignedPerm p = SignedPerm::identity(n);
  if (gens.empty()) return p;
  for (int k = 0; k < length; ++k) p = compose(p, gens[random_below(rng, gens.size())]);
  return p;
}

}  // namespace invar
