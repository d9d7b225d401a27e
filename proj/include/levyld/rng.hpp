#pragma once

#include <cstdint>
#include <random>

namespace levyld {

using Rng = std::mt19937_64;

// Independent stream for one (seed, index) pair. Simulations key one stream
// per path so results never depend on how paths are split across threads.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6c65u};
  return Rng(seq);
}

}  // namespace levyld
