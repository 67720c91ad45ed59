#include "dimsum/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "dimsum/pipelines.hpp"
#include "dimsum/rng.hpp"

namespace dimsum {

namespace {

void check_guard(std::size_t n) {
  if (n > kDenseGuard) {
    throw CapacityError("dense n x n work requested for n=" + std::to_string(n) +
                        " (limit " + std::to_string(kDenseGuard) + ")");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

DenseSymmetric::DenseSymmetric(std::size_t n) : n_(n) {
  check_guard(n);
  packed_.assign(n * (n + 1) / 2, 0.0);
}

DenseSymmetric DenseSymmetric::from_full(std::size_t n, std::span<const double> full) {
  if (full.size() != n * n) throw ContractError("dense input is not n x n");
  DenseSymmetric m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (full[i * n + j] != full[j * n + i]) {
        throw ContractError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
      m.at(i, j) = full[i * n + j];
    }
  }
  return m;
}

std::vector<double> DenseSymmetric::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = packed_.data() + slot(i, i);
    y[i] += row[0] * x[i];
    for (std::size_t j = i + 1; j < n_; ++j) {
      y[i] += row[j - i] * x[j];
      y[j] += row[j - i] * x[i];
    }
  }
  return y;
}

std::vector<double> DenseSymmetric::to_full() const {
  std::vector<double> full(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) full[i * n_ + j] = (*this)(i, j);
  return full;
}

double DenseSymmetric::frobenius() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

double DenseSymmetric::max_abs() const noexcept {
  double best = 0.0;
  for (double v : packed_) best = std::max(best, std::abs(v));
  return best;
}

DenseSymmetric DenseSymmetric::operator-(const DenseSymmetric& other) const {
  if (other.n_ != n_) throw ContractError("size mismatch in matrix difference");
  DenseSymmetric out = *this;
  for (std::size_t s = 0; s < packed_.size(); ++s) out.packed_[s] -= other.packed_[s];
  return out;
}

DenseSymmetric DenseSymmetric::scaled(double factor) const {
  DenseSymmetric out = *this;
  for (double& v : out.packed_) v *= factor;
  return out;
}

void write_dense_tsv(std::ostream& out, const DenseSymmetric& m) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j > 0) out << '\t';
      out << m(i, j);
    }
    out << '\n';
  }
  out.precision(old);
}

DenseSymmetric read_dense_tsv(std::istream& in) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream is(line);
    std::size_t count = 0;
    std::string token;
    while (is >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError(lineno, "not a number: '" + token + "'");
      }
      ++count;
    }
    if (rows == 0) width = count;
    if (count != width) throw ParseError(lineno, "ragged row");
    ++rows;
  }
  if (rows != width) throw ContractError("dense matrix is not square");
  return DenseSymmetric::from_full(rows, values);
}

DenseSymmetric exact_gram(const SparseRowMatrix& a) {
  DenseSymmetric g(a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t p = 0; p < row.size(); ++p)
      for (std::size_t q = p; q < row.size(); ++q)
        g.at(row[p].col, row[q].col) += row[p].value * row[q].value;
  }
  return g;
}

DenseSymmetric unnormalize(const SimilarityMatrix& b, const ColumnStats& stats) {
  if (b.kind != SimilarityKind::kCosine) {
    throw ContractError("unnormalize needs a cosine-kind similarity matrix");
  }
  const std::size_t n = b.values.size();
  if (stats.norms.size() != n) throw ContractError("column stats do not match matrix size");
  DenseSymmetric out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.at(i, j) = stats.norms[i] * b.values(i, j) * stats.norms[j];
  return out;
}

namespace {

constexpr std::size_t kPowerIterationCap = 100'000;
constexpr double kPowerTolerance = 1e-10;

/*
 * rho_k approaches lambda^2 from below at the geometric rate
 * (lambda_2/lambda_1)^2, so the stopping rule alone leaves an error of about
 * tol / (1 - rate) when the top two |eigenvalues| are close. One Aitken
 * delta-squared step removes that leading term. The step is only taken
 * when the sequence looks geometric and increasing, and the correction is
 * capped.
 */
double aitken(double r0, double r1, double r2) {
  const double d1 = r1 - r0;
  const double d2 = r2 - r1;
  const double denom = d2 - d1;
  if (!(d1 > 0.0) || !(d2 >= 0.0) || !(denom < 0.0)) return r2;
  const double corrected = r2 - d2 * d2 / denom;
  if (!(corrected >= r2) || corrected > r2 * (1.0 + 1e-6)) return r2;
  return corrected;
}

double power_iteration(const DenseSymmetric& m, std::vector<double> x) {
  const double start_norm = std::sqrt(dot(x, x));
  for (double& v : x) v /= start_norm;
  double rho_prev2 = -1.0;
  double rho_prev = -1.0;
  double rho = 0.0;
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    auto y = m.multiply(x);
    rho = dot(y, y);
    if (rho == 0.0) return 0.0;
    if (std::abs(rho - rho_prev) < kPowerTolerance * rho) {
      return std::sqrt(it >= 2 ? aitken(rho_prev2, rho_prev, rho) : rho);
    }
    rho_prev2 = rho_prev;
    rho_prev = rho;
    const double scale = 1.0 / std::sqrt(rho);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] * scale;
  }
  throw ConvergenceError("power iteration did not converge in " +
                             std::to_string(kPowerIterationCap) + " iterations",
                         std::move(x), std::sqrt(rho));
}

}  // namespace

double spectral_norm(const DenseSymmetric& m) {
  const std::size_t n = m.size();
  if (n == 0) return 0.0;
  const double from_ones = power_iteration(m, std::vector<double>(n, 1.0));

  std::vector<double> perturbed(n);
  RngStream rng(0x243f6a8885a308d3ull);
  for (double& v : perturbed) v = 1.0 + (rng.uniform() - 0.5);
  return std::max(from_ones, power_iteration(m, std::move(perturbed)));
}

EigenResult symmetric_eig(const DenseSymmetric& m) {
  const std::size_t n = m.size();
  check_guard(n);
  auto a = m.to_full();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;  // row-major while rotating

  const double tolerance = 1e-12 * m.frobenius();
  constexpr std::size_t kMaxSweeps = 100;
  std::size_t sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
    off = std::sqrt(off);
    if (off <= tolerance) break;
    if (sweep == kMaxSweeps) {
      throw NumericError("Jacobi eigensolver did not converge in 100 sweeps (off-diagonal " +
                         std::to_string(off) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  EigenResult result;
  result.sweeps = sweep;
  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    result.eigenvalues[c] = a[src * n + src];
    for (std::size_t k = 0; k < n; ++k) result.eigenvectors[c * n + k] = v[k * n + src];
  }
  return result;
}

SingularValues recover_singular_values(const DenseSymmetric& gram) {
  auto eig = symmetric_eig(gram);
  SingularValues out;
  out.sigma.reserve(eig.size());
  for (double lambda : eig.eigenvalues) {
    if (lambda < 0.0) ++out.clamped_negative;
    out.sigma.push_back(std::sqrt(std::max(lambda, 0.0)));
  }
  out.v = std::move(eig.eigenvectors);
  return out;
}

double relative_spectral_error(const DenseSymmetric& estimate, const DenseSymmetric& truth) {
  if (estimate.size() != truth.size()) throw ContractError("size mismatch in error metric");
  const double denom = spectral_norm(truth);
  if (denom == 0.0) throw DegenerateInputError("reference matrix has zero spectral norm");
  return spectral_norm(estimate - truth) / denom;
}

}  // namespace dimsum
