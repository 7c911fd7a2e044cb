#pragma once

#include <cstdint>

namespace qwloc {

// Counter-based generator: Threefry-2x64, 20 rounds. Every draw is a pure
// function of (key, counter), so a stream keyed by (seed, purpose) can be
// sampled at any index, in any order, from any thread, and always yields the
// same value. Disorder realizations indexed by site therefore do not depend
// on evaluation order or thread count.
struct Words2 {
  std::uint64_t x0;
  std::uint64_t x1;
};

Words2 threefry2x64(Words2 counter, Words2 key) noexcept;

// Two 64-bit words for draw `index` of the stream (seed, stream_id).
Words2 stream_words(std::uint64_t seed, std::uint64_t stream_id,
                    std::uint64_t index) noexcept;

// Uniform double strictly inside (0,1): top 53 bits, offset by half an ulp.
double uniform_open01(std::uint64_t word) noexcept;

// Expands a master seed into independent child seeds. Adding more
// repetitions or grid points never changes previously issued children.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t tag0,
                         std::uint64_t tag1) noexcept;

// Stream ids, one per consumer domain.
inline constexpr std::uint64_t kStreamDisorder = 1;   // on-site energies
inline constexpr std::uint64_t kStreamChildSeed = 2;  // seed expansion

}  // namespace qwloc
