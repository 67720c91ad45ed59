#include "dimsum/rng.hpp"

namespace dimsum {

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
  auto x = (*this)();
  auto m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream derive_row_rng(std::uint64_t master_seed, std::uint64_t row_index) noexcept {
  return RngStream(derive_seed(master_seed, row_index));
}

}  // namespace dimsum
