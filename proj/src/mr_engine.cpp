#include "dimsum/mr_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "dimsum/errors.hpp"

namespace dimsum {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("DIMSUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

namespace {

std::string key_string(PairKey key) {
  return "(" + std::to_string(key.j) + ", " + std::to_string(key.k) + ")";
}

// Stable grouping of emissions by key. Returns emission indices ordered by
// key, with ties in emission (row) order.
std::vector<std::uint32_t> group_order(const std::vector<Emission>& emissions,
                                       std::size_t n) {
  std::vector<std::uint32_t> order(emissions.size());
  const auto code = [n](PairKey key) {
    return static_cast<std::uint64_t>(key.j) * n + key.k;
  };
  constexpr std::size_t kCountingSortLimit = std::size_t{1} << 22;
  if (n * n <= kCountingSortLimit) {
    std::vector<std::uint32_t> start(n * n + 1, 0);
    for (const auto& e : emissions) ++start[code(e.key) + 1];
    for (std::size_t c = 1; c < start.size(); ++c) start[c] += start[c - 1];
    for (std::uint32_t i = 0; i < emissions.size(); ++i) order[start[code(emissions[i].key)]++] = i;
  } else {
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return emissions[a].key < emissions[b].key;
    });
  }
  return order;
}

}  // namespace

JobResult run_job(const SparseRowMatrix& a, const Mapper& mapper, const Reducer& reducer,
                  const JobOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = a.n_cols();
  const std::size_t m = a.n_rows();
  const std::size_t per_task = std::max<std::size_t>(1, options.rows_per_task);
  const std::size_t tasks = (m + per_task - 1) / per_task;
  const std::size_t threads = options.threads == 0 ? default_thread_count() : options.threads;

  // Map phase: each task owns a contiguous row range and its own buffer.
  std::vector<std::vector<Emission>> task_out(tasks);
  parallel_for(tasks, threads, [&](std::size_t t) {
    auto& out = task_out[t];
    const std::size_t end = std::min(m, (t + 1) * per_task);
    for (std::size_t i = t * per_task; i < end; ++i) {
      const std::size_t before = out.size();
      auto rng = derive_row_rng(options.master_seed, i);
      try {
        mapper(a.row(i), i, rng, out);
      } catch (const std::exception& ex) {
        throw JobError("map task failed at row " + std::to_string(i) + ": " + ex.what());
      }
      for (std::size_t e = before; e < out.size(); ++e) {
        auto& key = out[e].key;
        if (key.j > key.k) std::swap(key.j, key.k);
        if (key.k >= n) {
          throw JobError("map task at row " + std::to_string(i) + " emitted key " +
                         key_string(key) + " outside n=" + std::to_string(n));
        }
      }
    }
  });

  // Concatenate in task order, which is row order.
  std::vector<Emission> emissions;
  {
    std::size_t total = 0;
    for (const auto& out : task_out) total += out.size();
    if (total > std::numeric_limits<std::uint32_t>::max()) {
      throw CapacityError("map phase produced " + std::to_string(total) + " emissions");
    }
    emissions.reserve(total);
    for (auto& out : task_out) {
      emissions.insert(emissions.end(), out.begin(), out.end());
      std::vector<Emission>().swap(out);
    }
  }

  // Shuffle: group by exact key equality.
  const auto order = group_order(emissions, n);
  std::vector<double> grouped(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) grouped[i] = emissions[order[i]].value;
  std::vector<std::size_t> group_start;
  std::vector<PairKey> group_key;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const PairKey key = emissions[order[i]].key;
    if (i == 0 || key != group_key.back()) {
      group_start.push_back(i);
      group_key.push_back(key);
    }
  }
  group_start.push_back(order.size());

  JobResult result;
  auto& stats = result.stats;
  stats.shuffle_size = emissions.size();
  stats.distinct_keys = group_key.size();
  stats.map_tasks = tasks;
  for (std::size_t g = 0; g < group_key.size(); ++g) {
    stats.reduce_key_max =
        std::max<std::uint64_t>(stats.reduce_key_max, group_start[g + 1] - group_start[g]);
  }
  stats.reduce_key_mean = group_key.empty() ? 0.0
                                            : static_cast<double>(stats.shuffle_size) /
                                                  static_cast<double>(stats.distinct_keys);

  // Reduce phase: one call per distinct key, written by index.
  std::vector<std::optional<double>> reduced(group_key.size());
  parallel_for(group_key.size(), threads, [&](std::size_t g) {
    const std::span<const double> values(grouped.data() + group_start[g],
                                         group_start[g + 1] - group_start[g]);
    try {
      reduced[g] = reducer(group_key[g], values);
    } catch (const std::exception& ex) {
      throw JobError("reduce failed at key " + key_string(group_key[g]) + ": " + ex.what());
    }
  });
  for (std::size_t g = 0; g < group_key.size(); ++g) {
    if (reduced[g]) result.output.push_back({group_key[g], *reduced[g]});
  }

  if (options.keep_emission_log) result.emission_log = std::move(emissions);
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace dimsum
