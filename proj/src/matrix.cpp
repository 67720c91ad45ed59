#include "dimsum/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "dimsum/errors.hpp"
#include "dimsum/mr_engine.hpp"
#include "dimsum/rng.hpp"

namespace dimsum {

SparseRowMatrix::SparseRowMatrix(std::size_t n_rows, std::size_t n_cols,
                                 std::vector<SparseRow> rows)
    : n_rows_(n_rows), n_cols_(n_cols), rows_(std::move(rows)) {
  if (rows_.size() != n_rows_) {
    throw ParameterError("row count " + std::to_string(rows_.size()) +
                         " does not match declared " + std::to_string(n_rows_));
  }
  if (n_cols_ > std::numeric_limits<Index>::max()) {
    throw CapacityError("too many columns: " + std::to_string(n_cols_));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    for (std::size_t t = 0; t < row.size(); ++t) {
      const auto& e = row[t];
      if (e.col >= n_cols_) {
        throw BoundsError("row " + std::to_string(i) + ": column " + std::to_string(e.col) +
                          " outside [0, " + std::to_string(n_cols_) + ")");
      }
      if (e.value == 0.0 || !std::isfinite(e.value)) {
        throw ParameterError("row " + std::to_string(i) + ": stored value at column " +
                             std::to_string(e.col) + " is zero or not finite");
      }
      if (t > 0 && row[t - 1].col == e.col) {
        throw DuplicateError("row " + std::to_string(i) + ": duplicate column " +
                             std::to_string(e.col));
      }
      if (t > 0 && row[t - 1].col > e.col) {
        throw ParameterError("row " + std::to_string(i) + " is not sorted by column");
      }
    }
    nnz_ += row.size();
  }
}

std::size_t SparseRowMatrix::max_row_nnz() const noexcept {
  std::size_t best = 0;
  for (const auto& row : rows_) best = std::max(best, row.size());
  return best;
}

double SparseRowMatrix::max_abs() const noexcept {
  double best = 0.0;
  for (const auto& row : rows_)
    for (const auto& e : row) best = std::max(best, std::abs(e.value));
  return best;
}

double SparseRowMatrix::min_abs_nonzero() const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : rows_)
    for (const auto& e : row) best = std::min(best, std::abs(e.value));
  return nnz_ == 0 ? 0.0 : best;
}

bool SparseRowMatrix::is_nonnegative() const noexcept {
  for (const auto& row : rows_)
    for (const auto& e : row)
      if (e.value < 0.0) return false;
  return true;
}

MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "mm" || name == "mtx" || name == "matrix-market") return MatrixFormat::kMatrixMarket;
  if (name == "tsv" || name == "tsv-triples") return MatrixFormat::kTsvTriples;
  throw ParameterError("unknown matrix format '" + name + "'");
}

namespace {

struct Triple {
  std::size_t row;
  std::size_t col;
  double value;
  std::size_t line;
};

// Collects triples, checks bounds and duplicates, drops explicit zeros.
class MatrixAssembler {
 public:
  MatrixAssembler(std::size_t m, std::size_t n) : m_(m), n_(n), rows_(m) {}

  void add(std::size_t row, std::size_t col, double value, std::size_t line,
           LoadDiagnostics* diag) {
    if (row >= m_ || col >= n_) {
      throw BoundsError("line " + std::to_string(line) + ": entry (" + std::to_string(row) +
                        ", " + std::to_string(col) + ") outside declared " +
                        std::to_string(m_) + "x" + std::to_string(n_));
    }
    if (!std::isfinite(value)) throw ParseError(line, "non-finite value");
    auto [it, inserted] = seen_.emplace(std::pair{row, col}, line);
    if (!inserted) {
      throw DuplicateError("line " + std::to_string(line) + ": duplicate coordinate (" +
                           std::to_string(row) + ", " + std::to_string(col) +
                           "), first seen on line " + std::to_string(it->second));
    }
    if (value == 0.0) {
      if (diag != nullptr) ++diag->dropped_zeros;
      return;
    }
    rows_[row].push_back({static_cast<Index>(col), value});
  }

  SparseRowMatrix finish() && {
    for (auto& row : rows_) {
      std::sort(row.begin(), row.end(),
                [](const Entry& a, const Entry& b) { return a.col < b.col; });
    }
    return SparseRowMatrix(m_, n_, std::move(rows_));
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<SparseRow> rows_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen_;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

// Reads whitespace-separated fields and rejects trailing junk.
template <typename... Ts>
bool parse_fields(const std::string& line, Ts&... fields) {
  std::istringstream is(line);
  (is >> ... >> fields);
  if (is.fail()) return false;
  std::string rest;
  is >> rest;
  return rest.empty();
}

SparseRowMatrix read_matrix_market(std::istream& in, LoadDiagnostics* diag) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input, expected MatrixMarket header");
  ++lineno;
  std::istringstream header(lower(line));
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix") {
    throw ParseError(lineno, "missing '%%MatrixMarket matrix' banner");
  }
  if (layout != "coordinate") throw ParseError(lineno, "only coordinate layout is supported");
  if (field != "real" && field != "integer") {
    throw ParseError(lineno, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  // Size line after any comments.
  long long m = -1, n = -1, declared = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    if (!parse_fields(line, m, n, declared) || m < 0 || n < 0 || declared < 0) {
      throw ParseError(lineno, "malformed size line '" + line + "'");
    }
    break;
  }
  if (m < 0) throw ParseError(lineno, "missing size line");
  if (symmetric && m != n) throw ParseError(lineno, "symmetric matrix must be square");

  MatrixAssembler assembler(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  long long count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    long long r = 0, c = 0;
    double v = 0.0;
    if (!parse_fields(line, r, c, v)) throw ParseError(lineno, "malformed entry '" + line + "'");
    if (r < 1 || c < 1) {
      throw BoundsError("line " + std::to_string(lineno) + ": indices are 1-based, got (" +
                        std::to_string(r) + ", " + std::to_string(c) + ")");
    }
    ++count;
    if (count > declared) throw ParseError(lineno, "more entries than declared");
    const auto row = static_cast<std::size_t>(r - 1);
    const auto col = static_cast<std::size_t>(c - 1);
    assembler.add(row, col, v, lineno, diag);
    if (symmetric && row != col) assembler.add(col, row, v, lineno, diag);
  }
  if (count != declared) {
    throw ParseError(lineno, "expected " + std::to_string(declared) + " entries, found " +
                                 std::to_string(count));
  }
  return std::move(assembler).finish();
}

SparseRowMatrix read_tsv(std::istream& in, LoadDiagnostics* diag) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::pair<std::size_t, std::size_t>> shape;
  std::vector<Triple> triples;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (line[0] == '#') {
      std::string hash;
      long long m = -1, n = -1;
      if (triples.empty() && !shape && parse_fields(line, hash, m, n) && m >= 0 && n >= 0) {
        shape = {static_cast<std::size_t>(m), static_cast<std::size_t>(n)};
      }
      continue;
    }
    long long r = 0, c = 0;
    double v = 0.0;
    if (!parse_fields(line, r, c, v)) throw ParseError(lineno, "malformed triple '" + line + "'");
    if (r < 0 || c < 0) {
      throw BoundsError("line " + std::to_string(lineno) + ": negative index");
    }
    triples.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v, lineno});
  }
  std::size_t m = 0, n = 0;
  if (shape) {
    std::tie(m, n) = *shape;
  } else {
    for (const auto& t : triples) {
      m = std::max(m, t.row + 1);
      n = std::max(n, t.col + 1);
    }
  }
  MatrixAssembler assembler(m, n);
  for (const auto& t : triples) assembler.add(t.row, t.col, t.value, t.line, diag);
  return std::move(assembler).finish();
}

}  // namespace

SparseRowMatrix read_matrix(std::istream& in, MatrixFormat format, LoadDiagnostics* diagnostics) {
  switch (format) {
    case MatrixFormat::kMatrixMarket:
      return read_matrix_market(in, diagnostics);
    case MatrixFormat::kTsvTriples:
      return read_tsv(in, diagnostics);
  }
  throw ParameterError("unknown matrix format");
}

SparseRowMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                            LoadDiagnostics* diagnostics) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path.string() + "'");
  return read_matrix(in, format, diagnostics);
}

void write_matrix(std::ostream& out, const SparseRowMatrix& a, MatrixFormat format) {
  const auto old_precision = out.precision(17);
  if (format == MatrixFormat::kMatrixMarket) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n_rows() << ' ' << a.n_cols() << ' ' << a.nnz() << '\n';
    for (std::size_t i = 0; i < a.n_rows(); ++i)
      for (const auto& e : a.row(i)) out << i + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
  } else {
    out << "# " << a.n_rows() << ' ' << a.n_cols() << '\n';
    for (std::size_t i = 0; i < a.n_rows(); ++i)
      for (const auto& e : a.row(i)) out << i << '\t' << e.col << '\t' << e.value << '\n';
  }
  out.precision(old_precision);
}

void write_matrix(const std::filesystem::path& path, const SparseRowMatrix& a,
                  MatrixFormat format) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write '" + path.string() + "'");
  write_matrix(out, a, format);
}

ScaledMatrix scale_entries(const SparseRowMatrix& a) {
  const double scale = a.max_abs();
  if (a.nnz() == 0 || scale == 0.0) throw DegenerateInputError("cannot scale an all-zero matrix");
  std::vector<SparseRow> rows = a.rows();
  if (scale != 1.0) {
    for (auto& row : rows)
      for (auto& e : row) {
        e.value /= scale;  // x / x == 1 exactly, so the peak lands on +-1
        if (e.value == 0.0) throw DegenerateInputError("entry underflows to zero after scaling");
      }
  }
  return {SparseRowMatrix(a.n_rows(), a.n_cols(), std::move(rows)), scale};
}

double ColumnStats::max_norm() const noexcept {
  double best = 0.0;
  for (double v : norms) best = std::max(best, v);
  return best;
}

ColumnStats column_stats(const SparseRowMatrix& a) {
  if (a.nnz() == 0) throw DegenerateInputError("column statistics of an empty matrix");

  const Mapper squares = [](std::span<const Entry> row, std::size_t, RngStream&,
                            std::vector<Emission>& out) {
    for (const auto& e : row) out.push_back({{e.col, e.col}, e.value * e.value});
  };
  const Reducer sum = [](PairKey, std::span<const double> values) -> std::optional<double> {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  };
  auto job = run_job(a, squares, sum);

  ColumnStats stats;
  stats.norms.assign(a.n_cols(), 0.0);
  for (const auto& kv : job.output) stats.norms[kv.key.j] = std::sqrt(kv.value);
  stats.h_min = a.min_abs_nonzero();
  stats.pass_stats = job.stats;
  return stats;
}

SparseRowMatrix generate_random_sparse(std::size_t m, std::size_t n, std::size_t L,
                                       ValueDist dist, std::uint64_t seed) {
  if (L > n) {
    throw ParameterError("row sparsity L=" + std::to_string(L) + " exceeds n=" +
                         std::to_string(n));
  }
  if (n > std::numeric_limits<Index>::max()) throw CapacityError("too many columns");
  std::vector<SparseRow> rows(m);
  std::vector<Index> picked;
  for (std::size_t i = 0; i < m; ++i) {
    auto rng = derive_row_rng(seed, i);
    // Floyd's sampling of L distinct columns.
    picked.clear();
    for (std::size_t t = n - L; t < n; ++t) {
      auto c = static_cast<Index>(rng.below(t + 1));
      if (std::find(picked.begin(), picked.end(), c) != picked.end()) c = static_cast<Index>(t);
      picked.push_back(c);
    }
    std::sort(picked.begin(), picked.end());
    auto& row = rows[i];
    row.reserve(L);
    for (Index c : picked) {
      const double v = dist == ValueDist::kBinary ? 1.0 : 1.0 - rng.uniform();
      row.push_back({c, v});
    }
  }
  return SparseRowMatrix(m, n, std::move(rows));
}

SparseRowMatrix generate_lowerbound_dataset(std::size_t n, std::size_t L) {
  if (L == 0 || n % L != 0) {
    throw ParameterError("L=" + std::to_string(L) + " must divide n=" + std::to_string(n));
  }
  std::vector<SparseRow> rows;
  rows.reserve(n);
  for (std::size_t g = 0; g < n / L; ++g) {
    SparseRow row;
    for (std::size_t t = 0; t < L; ++t) row.push_back({static_cast<Index>(g * L + t), 1.0});
    for (std::size_t copy = 0; copy < L; ++copy) rows.push_back(row);
  }
  return SparseRowMatrix(n, n, std::move(rows));
}

}  // namespace dimsum
