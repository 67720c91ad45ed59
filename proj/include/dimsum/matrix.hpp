#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "dimsum/mr_stats.hpp"

namespace dimsum {

using Index = std::uint32_t;

struct Entry {
  Index col;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

using SparseRow = std::vector<Entry>;

/*
 * Tall sparse matrix stored row by row.
 *
 * Every row is sorted by strictly increasing column index, holds no exact
 * zeros and only indices in [0, n_cols). The constructor enforces this;
 * the object is immutable afterwards.
 */
class SparseRowMatrix {
 public:
  SparseRowMatrix() = default;

  // Throws BoundsError on out-of-range columns, DuplicateError on repeated
  // columns in a row, ParameterError on unsorted rows or stored zeros.
  SparseRowMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<SparseRow> rows);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return nnz_; }

  std::span<const Entry> row(std::size_t i) const { return rows_[i]; }
  const std::vector<SparseRow>& rows() const noexcept { return rows_; }

  // Largest number of nonzeros in any row.
  std::size_t max_row_nnz() const noexcept;
  double max_abs() const noexcept;
  double min_abs_nonzero() const noexcept;
  bool is_nonnegative() const noexcept;

  friend bool operator==(const SparseRowMatrix&, const SparseRowMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::size_t nnz_ = 0;
  std::vector<SparseRow> rows_;
};

enum class MatrixFormat { kMatrixMarket, kTsvTriples };

MatrixFormat parse_matrix_format(const std::string& name);

struct LoadDiagnostics {
  std::size_t dropped_zeros = 0;
};

// MatrixMarket coordinate (1-based, general or symmetric) or TSV triples
// (0-based `row<TAB>col<TAB>value`, optional `# m n` shape line).
SparseRowMatrix read_matrix(std::istream& in, MatrixFormat format,
                            LoadDiagnostics* diagnostics = nullptr);
SparseRowMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                            LoadDiagnostics* diagnostics = nullptr);

// Values are written with 17 significant digits so a reload is exact.
void write_matrix(std::ostream& out, const SparseRowMatrix& a, MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const SparseRowMatrix& a,
                  MatrixFormat format);

struct ScaledMatrix {
  SparseRowMatrix matrix;
  double scale_factor = 1.0;
};

// Divides every entry by max|a_ij| so the result lies in [-1, 1].
ScaledMatrix scale_entries(const SparseRowMatrix& a);

struct ColumnStats {
  std::vector<double> norms;  // Euclidean magnitude of each column
  double h_min = 0.0;         // smallest nonzero |a_ij|
  RunStats pass_stats;        // shuffle accounting of the norms pass

  double max_norm() const noexcept;
};

// Computed through the map/reduce engine: one emission ((j, j) -> a_ij^2)
// per stored entry, summed per key.
ColumnStats column_stats(const SparseRowMatrix& a);

enum class ValueDist { kBinary, kUniform01 };

// Every row gets exactly L distinct, uniformly chosen columns. Uniform
// values are drawn from (0, 1].
SparseRowMatrix generate_random_sparse(std::size_t m, std::size_t n, std::size_t L,
                                       ValueDist dist, std::uint64_t seed);

// n/L column groups of L columns each; each group's indicator row is
// repeated L times, so m = n and all within-group column pairs have
// cosine exactly 1.
SparseRowMatrix generate_lowerbound_dataset(std::size_t n, std::size_t L);

}  // namespace dimsum
