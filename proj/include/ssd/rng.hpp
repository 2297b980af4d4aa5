#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ssd {

using Rng = std::mt19937_64;

// splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent substream seed from a master seed and a path of
// indices (purpose, cell, trial, ...). The result depends only on the path
// values, never on evaluation order, so parallel sweeps are reproducible
// regardless of scheduling.
inline std::uint64_t substream(std::uint64_t master,
                               std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0xbb67ae8584caa73bULL));
  return h;
}

inline Rng make_rng(std::uint64_t master,
                    std::initializer_list<std::uint64_t> path) {
  return Rng(substream(master, path));
}

}  // namespace ssd
