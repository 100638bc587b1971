#pragma once

#include <cstdint>
#include <initializer_list>

namespace morphgrad {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds an ordered list of indices into one seed. Order matters, so
// (generation, candidate) and (candidate, generation) give different seeds.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

// Stream tags keep the sampling, rollout and evaluation seeds disjoint.
enum class SeedStream : std::uint64_t {
  kSampling = 0x53414d50,
  kRollout = 0x524f4c4c,
  kEvaluation = 0x4556414c,
  kInit = 0x494e4954,
};

inline std::uint64_t stream_seed(SeedStream stream, std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = derive_seed({static_cast<std::uint64_t>(stream), master});
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

}  // namespace morphgrad
