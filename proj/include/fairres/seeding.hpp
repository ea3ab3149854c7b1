#pragma once

#include <cstdint>

namespace fairres {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * Counter-based child seed: child(master, trial, stream) depends only on its
 * arguments, so any trial can be reproduced in isolation.
 */
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream = 0) noexcept {
  return mix64(mix64(master ^ mix64(trial)) + stream * 0xd1b54a32d192ed03ULL);
}

namespace streams {
inline constexpr std::uint64_t instance = 0;
inline constexpr std::uint64_t losses = 1;
inline constexpr std::uint64_t oracle = 2;
inline constexpr std::uint64_t sequence = 3;
}  // namespace streams

}  // namespace fairres
