#include "dimsum/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dimsum/errors.hpp"

namespace dimsum {

double gamma_for_epsilon(std::size_t n, double epsilon, double c) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(c > 0.0)) throw ParameterError("calibration constant c must be positive");
  return c * static_cast<double>(n) / (epsilon * epsilon);
}

double saturation_gamma(const ColumnStats& stats) {
  const double top = stats.max_norm();
  return top * top;
}

double dimsum_probability(double gamma, double norm_j, double norm_k) {
  return std::min(1.0, gamma / (norm_j * norm_k));
}

void naive_map(std::span<const Entry> row, std::vector<Emission>& out) {
  for (std::size_t p = 0; p < row.size(); ++p)
    for (std::size_t q = p; q < row.size(); ++q)
      out.push_back({{row[p].col, row[q].col}, row[p].value * row[q].value});
}

double naive_reduce(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

void dimsum_map(std::span<const Entry> row, const SamplingConfig& cfg, const ColumnStats& stats,
                RngStream& rng, std::vector<Emission>& out) {
  for (std::size_t p = 0; p < row.size(); ++p) {
    const double norm_p = stats.norms[row[p].col];
    for (std::size_t q = p; q < row.size(); ++q) {
      const double prob = dimsum_probability(cfg.gamma, norm_p, stats.norms[row[q].col]);
      if (rng.uniform() < prob) {
        out.push_back({{row[p].col, row[q].col}, row[p].value * row[q].value});
      }
    }
  }
}

double dimsum_reduce(PairKey key, std::span<const double> values, const SamplingConfig& cfg,
                     const ColumnStats& stats) {
  const double norms = stats.norms[key.j] * stats.norms[key.k];
  const double sum = naive_reduce(values);
  // Saturated keys were emitted deterministically: the sum is the exact dot.
  if (cfg.gamma / norms > 1.0) return sum / norms;
  return sum / cfg.gamma;
}

void lean_dimsum_map(std::span<const Entry> row, const SamplingConfig& cfg,
                     const ColumnStats& stats, RngStream& rng, std::vector<Emission>& out) {
  const double root = std::sqrt(cfg.gamma);
  // Surviving entries with their divisor min(sqrt(gamma), ||c_j||).
  thread_local std::vector<std::pair<const Entry*, double>> kept;
  kept.clear();
  for (const auto& e : row) {
    const double norm = stats.norms[e.col];
    const double prob = std::min(1.0, root / norm);
    if (rng.uniform() < prob) kept.push_back({&e, std::min(root, norm)});
  }
  for (std::size_t p = 0; p < kept.size(); ++p) {
    for (std::size_t q = p; q < kept.size(); ++q) {
      const auto& [ep, dp] = kept[p];
      const auto& [eq, dq] = kept[q];
      out.push_back({{ep->col, eq->col}, ep->value * eq->value / (dp * dq)});
    }
  }
}

SimilarityMatrix assemble(std::size_t n, std::span<const KeyedValue> keyed, SimilarityKind kind) {
  SimilarityMatrix b{DenseSymmetric(n), kind, false};
  for (const auto& kv : keyed) b.values.at(kv.key.j, kv.key.k) = kv.value;
  return b;
}

void set_exact_diagonal(SimilarityMatrix& b, const ColumnStats& stats) {
  if (b.kind != SimilarityKind::kCosine) {
    throw ContractError("exact diagonal only applies to cosine-kind matrices");
  }
  for (std::size_t j = 0; j < b.size(); ++j) b.values.at(j, j) = stats.norms[j] > 0.0 ? 1.0 : 0.0;
  b.diagonal_exact = true;
}

PipelineResult run_naive(const SparseRowMatrix& a, const PipelineOptions& options) {
  const Mapper mapper = [](std::span<const Entry> row, std::size_t, RngStream&,
                           std::vector<Emission>& out) { naive_map(row, out); };
  const Reducer reducer = [](PairKey, std::span<const double> values) -> std::optional<double> {
    return naive_reduce(values);
  };
  JobOptions job;
  job.master_seed = options.seed;
  job.threads = options.threads;
  job.keep_emission_log = options.keep_emission_log;
  auto out = run_job(a, mapper, reducer, job);

  PipelineResult result{assemble(a.n_cols(), out.output, SimilarityKind::kGram), out.stats,
                        std::move(out.output), std::move(out.emission_log)};
  return result;
}

PipelineResult run_sampled(const SparseRowMatrix& a, const ColumnStats& stats,
                           const SamplingConfig& cfg, const PipelineOptions& options) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
    throw ParameterError("gamma must be a finite non-negative number");
  }
  if (stats.norms.size() != a.n_cols()) {
    throw ContractError("column stats were computed for a different matrix");
  }

  Mapper mapper;
  Reducer reducer;
  if (cfg.mode == SamplingMode::kDimsum) {
    mapper = [&](std::span<const Entry> row, std::size_t, RngStream& rng,
                 std::vector<Emission>& out) { dimsum_map(row, cfg, stats, rng, out); };
    reducer = [&](PairKey key, std::span<const double> values) -> std::optional<double> {
      return dimsum_reduce(key, values, cfg, stats);
    };
  } else {
    mapper = [&](std::span<const Entry> row, std::size_t, RngStream& rng,
                 std::vector<Emission>& out) { lean_dimsum_map(row, cfg, stats, rng, out); };
    reducer = [](PairKey, std::span<const double> values) -> std::optional<double> {
      return naive_reduce(values);
    };
  }

  JobOptions job;
  job.master_seed = options.seed;
  job.threads = options.threads;
  job.keep_emission_log = options.keep_emission_log;
  auto out = run_job(a, mapper, reducer, job);

  PipelineResult result{assemble(a.n_cols(), out.output, SimilarityKind::kCosine), out.stats,
                        std::move(out.output), std::move(out.emission_log)};
  if (options.exact_diagonal) set_exact_diagonal(result.similarity, stats);
  return result;
}

void write_similarity_mm(std::ostream& out, const SimilarityMatrix& b) {
  const std::size_t n = b.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (b.values(i, j) != 0.0) ++count;
  const auto old = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << "% kind " << (b.kind == SimilarityKind::kCosine ? "cosine" : "gram")
      << (b.diagonal_exact ? " diagonal-exact" : "") << '\n';
  out << n << ' ' << n << ' ' << count << '\n';
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (b.values(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << b.values(i, j) << '\n';
  out.precision(old);
}

}  // namespace dimsum
