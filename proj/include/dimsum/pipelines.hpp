#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dimsum/matrix.hpp"
#include "dimsum/mr_engine.hpp"
#include "dimsum/spectral.hpp"

namespace dimsum {

enum class SimilarityKind { kGram, kCosine };

enum class SamplingMode { kDimsum, kLean };

struct SamplingConfig {
  double gamma = 1.0;  // oversampling parameter; 0 disables all emissions
  SamplingMode mode = SamplingMode::kDimsum;
};

// Output of one reducer pass: dot products (naive) or cosine estimates.
// Sampled estimates are never clamped to [-1, 1].
struct SimilarityMatrix {
  DenseSymmetric values;
  SimilarityKind kind = SimilarityKind::kGram;
  bool diagonal_exact = false;  // diagonal overwritten with exact cosine 1

  std::size_t size() const noexcept { return values.size(); }
};

// gamma = c * n / epsilon^2
double gamma_for_epsilon(std::size_t n, double epsilon, double c = 4.0);

// Smallest gamma at which every emission probability of both samplers is 1.
double saturation_gamma(const ColumnStats& stats);

// Emission probability min(1, gamma / (||c_j|| ||c_k||)).
double dimsum_probability(double gamma, double norm_j, double norm_k);

// Per-row mappers and reducers. Mappers emit every pair j <= k of the row's
// nonzeros, diagonal included.

void naive_map(std::span<const Entry> row, std::vector<Emission>& out);
double naive_reduce(std::span<const double> values);

// One uniform draw per pair, consumed even when the probability is 1.
void dimsum_map(std::span<const Entry> row, const SamplingConfig& cfg, const ColumnStats& stats,
                RngStream& rng, std::vector<Emission>& out);
double dimsum_reduce(PairKey key, std::span<const double> values, const SamplingConfig& cfg,
                     const ColumnStats& stats);

// One survival coin per (row, column) with probability
// min(1, sqrt(gamma)/||c_j||); surviving pairs emit
// a_ij a_ik / (min(sqrt(gamma), ||c_j||) min(sqrt(gamma), ||c_k||)).
// Reduced with naive_reduce.
void lean_dimsum_map(std::span<const Entry> row, const SamplingConfig& cfg,
                     const ColumnStats& stats, RngStream& rng, std::vector<Emission>& out);

struct PipelineOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Set the cosine diagonal to exactly 1 (0 for empty columns) after
  // reduction. Off gives the raw algorithm output.
  bool exact_diagonal = true;
  bool keep_emission_log = false;
};

struct PipelineResult {
  SimilarityMatrix similarity;
  RunStats stats;
  std::vector<KeyedValue> keyed;       // raw reducer output, sorted by key
  std::vector<Emission> emission_log;  // only when requested
};

PipelineResult run_naive(const SparseRowMatrix& a, const PipelineOptions& options = {});

// Runs DIMSUM or Lean DIMSUM according to cfg.mode.
PipelineResult run_sampled(const SparseRowMatrix& a, const ColumnStats& stats,
                           const SamplingConfig& cfg, const PipelineOptions& options = {});

// Mirrors keyed reducer output into an n x n matrix; absent keys read 0.
SimilarityMatrix assemble(std::size_t n, std::span<const KeyedValue> keyed, SimilarityKind kind);

void set_exact_diagonal(SimilarityMatrix& b, const ColumnStats& stats);

// MatrixMarket `coordinate real symmetric`: lower triangle, nonzero slots only.
void write_similarity_mm(std::ostream& out, const SimilarityMatrix& b);

}  // namespace dimsum
