#pragma once

#include <cstdint>

namespace dimsum {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives a child seed from (parent, index). Distinct indices give
// decorrelated children; used for per-row streams and per-trial seeds.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(parent ^ 0x6a09e667f3bcc909ull) +
               0x9e3779b97f4a7c15ull * (index + 1));
}

/*
 * Random stream for one map task row.
 *
 * A SplitMix64 generator whose initial state is a function of
 * (master_seed, row_index) only, so the draws a row sees do not depend on
 * how rows are scheduled across workers.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RngStream(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    return mix64(state_ += 0x9e3779b97f4a7c15ull);
  }

  // Uniform real in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
  // rejection, so the result is exactly uniform.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

RngStream derive_row_rng(std::uint64_t master_seed, std::uint64_t row_index) noexcept;

}  // namespace dimsum
