#pragma once

#include <cstdint>

namespace lasdp {

/// splitmix64 finalizer; used to derive independent stream seeds from a
/// master seed and a counter so results do not depend on scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace lasdp
