#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace robustrl {

using Rng = std::mt19937_64;

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a path of integer tags:
///   h = master; for each tag t: h = splitmix64(h ^ splitmix64(t)).
/// The result depends only on (master, path), never on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = master;
  for (std::uint64_t tag : path) h = splitmix64(h ^ splitmix64(tag));
  return h;
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Samples an index from a (not necessarily normalized) weight vector by
/// inverse-CDF scan. Weights must be non-negative with a positive sum.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace robustrl
