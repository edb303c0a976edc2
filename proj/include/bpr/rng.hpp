// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace bpr {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

/// FNV-1a, used to fold an experiment name into a seed.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed fan-out: the seed for a cell is a chained SplitMix64
/// of (master, experiment name, cell indices...). Streams for distinct index
/// tuples are independent for practical purposes.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment,
                                 std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = mix_seed(master, hash_name(experiment));
  for (std::uint64_t i : indices) s = mix_seed(s, i);
  return s;
}

}  // namespace bpr
