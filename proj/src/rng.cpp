#include "qwloc/rng.hpp"

#include <bit>

namespace qwloc {

namespace {
constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;
constexpr int kRounds = 20;
constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
}  // namespace

Words2 threefry2x64(Words2 c, Words2 k) noexcept {
  const std::uint64_t ks[3] = {k.x0, k.x1, k.x0 ^ k.x1 ^ kParity};
  std::uint64_t x0 = c.x0 + ks[0];
  std::uint64_t x1 = c.x1 + ks[1];
  for (int r = 0; r < kRounds; ++r) {
    x0 += x1;
    x1 = std::rotl(x1, kRot[r & 7]);
    x1 ^= x0;
    if ((r & 3) == 3) {
      const std::uint64_t s = static_cast<std::uint64_t>(r / 4) + 1;
      x0 += ks[s % 3];
      x1 += ks[(s + 1) % 3] + s;
    }
  }
  return {x0, x1};
}

Words2 stream_words(std::uint64_t seed, std::uint64_t stream_id,
                    std::uint64_t index) noexcept {
  return threefry2x64({index, 0}, {seed, stream_id});
}

double uniform_open01(std::uint64_t word) noexcept {
  // 52 bits, offset to bin centres: every value in [2^-53, 1 - 2^-53] is
  // exactly representable, so the interval stays genuinely open. One more
  // bit would round the top bin up to 1.0.
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t tag0,
                         std::uint64_t tag1) noexcept {
  return threefry2x64({tag0, tag1}, {master, kStreamChildSeed}).x0;
}

}  // namespace qwloc
