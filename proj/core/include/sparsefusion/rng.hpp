// Deterministic seed splitting. Every randomized operation draws from its
// own mt19937_64 stream keyed by (base seed, operation tag, instance id),
// so adding an object to a scene never perturbs the samples of another.
//
// split_seed mixes the three words through splitmix64 finalization steps;
// the scheme is fixed and forms part of the scene file contract.
#pragma once

#include <cstdint>
#include <random>

namespace sparsefusion {

// Stream tags for the randomized operations of the pipeline.
enum class RngStream : std::uint64_t {
  kPlacement = 1,
  kSurfacePoints = 2,
  kBackground = 3,
  kPointDropout = 4,
  kMaskResample = 5,
  kScoreFlip = 6,
  kVoteNoise = 7,
  kMaskDrop = 8,
  kMaskSpurious = 9,
  kMaskMerge = 10,
  kSceneIndex = 11,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t base, RngStream stream,
                                std::uint64_t instance = 0) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
  return splitmix64(s ^ instance);
}

inline std::mt19937_64 make_rng(std::uint64_t base, RngStream stream,
                                std::uint64_t instance = 0) {
  return std::mt19937_64(split_seed(base, stream, instance));
}

}  // namespace sparsefusion
