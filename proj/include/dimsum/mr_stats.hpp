#pragma once

#include <compare>
#include <cstdint>

namespace dimsum {

// Shuffle key: an unordered column pair stored canonically with j <= k.
struct PairKey {
  std::uint32_t j = 0;
  std::uint32_t k = 0;

  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct RunStats {
  std::uint64_t shuffle_size = 0;    // emissions out of the map phase
  std::uint64_t reduce_key_max = 0;  // largest group handed to one reducer call
  double reduce_key_mean = 0.0;      // shuffle_size / distinct_keys
  std::uint64_t distinct_keys = 0;
  std::uint64_t map_tasks = 0;
  bool canonical_keys = true;  // keys folded to j <= k, diagonal included
  double wall_seconds = 0.0;   // not compared by determinism checks

  // Equality ignores wall time.
  friend bool operator==(const RunStats& a, const RunStats& b) {
    return a.shuffle_size == b.shuffle_size && a.reduce_key_max == b.reduce_key_max &&
           a.reduce_key_mean == b.reduce_key_mean && a.distinct_keys == b.distinct_keys &&
           a.map_tasks == b.map_tasks && a.canonical_keys == b.canonical_keys;
  }
};

}  // namespace dimsum
