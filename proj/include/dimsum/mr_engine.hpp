#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dimsum/matrix.hpp"
#include "dimsum/mr_stats.hpp"
#include "dimsum/rng.hpp"

namespace dimsum {

struct Emission {
  PairKey key;
  double value = 0.0;

  friend bool operator==(const Emission&, const Emission&) = default;
};

struct KeyedValue {
  PairKey key;
  double value = 0.0;

  friend bool operator==(const KeyedValue&, const KeyedValue&) = default;
};

// Appends this row's emissions to `out`. Must depend only on its
// arguments; `rng` is the row's own stream.
using Mapper = std::function<void(std::span<const Entry> row, std::size_t row_index,
                                  RngStream& rng, std::vector<Emission>& out)>;

// Called once per distinct key with that key's values in row order.
// Returning nullopt drops the key from the output.
using Reducer =
    std::function<std::optional<double>(PairKey key, std::span<const double> values)>;

struct JobOptions {
  std::uint64_t master_seed = 0;
  // Worker threads; 0 means default_thread_count(). Results do not depend
  // on this value.
  std::size_t threads = 1;
  // Rows per map task. Fixes map_tasks independently of `threads`.
  std::size_t rows_per_task = 4096;
  bool keep_emission_log = false;
};

struct JobResult {
  std::vector<KeyedValue> output;     // sorted by key
  RunStats stats;
  std::vector<Emission> emission_log;  // map-phase output in row order, if requested
};

/*
 * Runs one map/shuffle/reduce job over the rows of `a`.
 *
 * Keys are canonicalized to j <= k and checked against n_cols. Grouping is
 * by exact key equality and stable, so each reducer sees values in row
 * order. For a fixed master seed the output is bit-identical whatever the
 * thread count.
 */
JobResult run_job(const SparseRowMatrix& a, const Mapper& mapper, const Reducer& reducer,
                  const JobOptions& options = {});

// DIMSUM_THREADS if set and positive, otherwise hardware concurrency.
std::size_t default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dimsum
