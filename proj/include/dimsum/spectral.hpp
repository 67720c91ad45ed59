#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dimsum/errors.hpp"
#include "dimsum/matrix.hpp"

namespace dimsum {

// Largest n for which dense n x n work is allowed.
inline constexpr std::size_t kDenseGuard = 10'000;

/*
 * Dense symmetric n x n matrix, upper triangle packed row by row.
 * (i, j) and (j, i) address the same slot, so symmetry is exact.
 */
class DenseSymmetric {
 public:
  DenseSymmetric() = default;
  explicit DenseSymmetric(std::size_t n);

  // Row-major input; throws ContractError unless it is exactly symmetric.
  static DenseSymmetric from_full(std::size_t n, std::span<const double> full);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return packed_[slot(i, j)];
  }
  double& at(std::size_t i, std::size_t j) noexcept { return packed_[slot(i, j)]; }

  // y = M x
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> to_full() const;
  double frobenius() const noexcept;
  double max_abs() const noexcept;

  DenseSymmetric operator-(const DenseSymmetric& other) const;
  DenseSymmetric scaled(double factor) const;

  friend bool operator==(const DenseSymmetric&, const DenseSymmetric&) = default;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

// Tab-separated, one matrix row per line, 17 significant digits.
void write_dense_tsv(std::ostream& out, const DenseSymmetric& m);
DenseSymmetric read_dense_tsv(std::istream& in);

struct EigenResult {
  std::vector<double> eigenvalues;   // descending
  std::vector<double> eigenvectors;  // column-major n x n, column i pairs with eigenvalue i
  std::size_t sweeps = 0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  std::span<const double> vector(std::size_t i) const {
    return {eigenvectors.data() + i * size(), size()};
  }
};

// Power iteration did not settle; carries the last iterate and estimate.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate, double estimate)
      : NumericError(what), last_iterate_(std::move(last_iterate)), estimate_(estimate) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double estimate() const noexcept { return estimate_; }

 private:
  std::vector<double> last_iterate_;
  double estimate_;
};

// [A^T A]_jk accumulated row by row.
DenseSymmetric exact_gram(const SparseRowMatrix& a);

struct SimilarityMatrix;

// D B D with D = diag(column norms).
DenseSymmetric unnormalize(const SimilarityMatrix& b, const ColumnStats& stats);

/*
 * Largest |eigenvalue| of a symmetric matrix.
 *
 * Power iteration from the normalized all-ones vector, tracking
 * rho_k = ||M x_k||^2 (the Rayleigh quotient of M^2, so a +-lambda pair
 * cannot cause oscillation). Stops when successive rho differ by less than
 * 1e-10 relative, then applies one Aitken extrapolation step to the last
 * three rho values; throws ConvergenceError after 10^5 iterations. A second
 * run from a fixed perturbed start vector covers the case where the all-ones
 * vector is orthogonal to the dominant eigenvector; the larger result wins.
 */
double spectral_norm(const DenseSymmetric& m);

// Cyclic Jacobi. Converged once the off-diagonal Frobenius mass is below
// 1e-12 * ||M||_F; throws NumericError after 100 sweeps.
EigenResult symmetric_eig(const DenseSymmetric& m);

struct SingularValues {
  std::vector<double> sigma;  // descending
  std::vector<double> v;      // column-major n x n right singular vectors
  std::size_t clamped_negative = 0;
};

// sigma_i = sqrt(max(lambda_i, 0)) of the Gram estimate.
SingularValues recover_singular_values(const DenseSymmetric& gram);

// ||estimate - truth||_2 / ||truth||_2
double relative_spectral_error(const DenseSymmetric& estimate, const DenseSymmetric& truth);

}  // namespace dimsum
