#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dimsum/errors.hpp"
#include "dimsum/pipelines.hpp"
#include "dimsum/spectral.hpp"
#include "oracles.hpp"

using namespace dimsum;

namespace {

DenseSymmetric sym(std::size_t n, std::vector<double> full) {
  return DenseSymmetric::from_full(n, full);
}

double max_abs_eig(const std::vector<double>& full, std::size_t n) {
  const auto ev = oracle::eigenvalues_desc(full, n);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace

TEST_CASE("exact_gram") {
  CHECK(exact_gram(SparseRowMatrix(2, 2, {{{0, 1.0}}, {{1, 1.0}}})) == sym(2, {1, 0, 0, 1}));
  CHECK(exact_gram(SparseRowMatrix(2, 2, {{{0, 1.0}}, {{0, 1.0}, {1, 1.0}}})) ==
        sym(2, {2, 1, 1, 1}));
  SUBCASE("all ones gives m everywhere") {
    const auto a = generate_random_sparse(9, 4, 4, ValueDist::kBinary, 0);
    const auto g = exact_gram(a);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) CHECK(g(j, k) == 9.0);
  }
  SUBCASE("matches the dense oracle") {
    const auto a = generate_random_sparse(300, 20, 7, ValueDist::kUniform01, 3);
    const auto g = exact_gram(a);
    const auto ref = oracle::gram(a);
    for (std::size_t j = 0; j < 20; ++j)
      for (std::size_t k = 0; k < 20; ++k) CHECK(oracle::rel_close(g(j, k), ref[j][k], 1e-12));
  }
}

TEST_CASE("DenseSymmetric") {
  CHECK_THROWS_AS(sym(2, {1, 2, 3, 4}), ContractError);
  const auto m = sym(3, {1, 2, 3, 2, 4, 5, 3, 5, 6});
  CHECK(m.multiply(std::vector<double>{1, 0, 0}) == std::vector<double>{1, 2, 3});
  CHECK(m.to_full() == std::vector<double>{1, 2, 3, 2, 4, 5, 3, 5, 6});
  CHECK(m.frobenius() == doctest::Approx(std::sqrt(1 + 4 + 9 + 4 + 16 + 25 + 9 + 25 + 36)));
  std::stringstream buf;
  write_dense_tsv(buf, m);
  CHECK(read_dense_tsv(buf) == m);
  CHECK_THROWS_AS(DenseSymmetric(kDenseGuard + 1), CapacityError);
}

TEST_CASE("unnormalize") {
  ColumnStats stats;
  stats.norms = {2.0, 3.0};
  SimilarityMatrix b{sym(2, {1.0, 0.5, 0.5, 1.0}), SimilarityKind::kCosine, true};
  CHECK(unnormalize(b, stats) == sym(2, {4.0, 3.0, 3.0, 9.0}));
  SimilarityMatrix eye{sym(2, {1, 0, 0, 1}), SimilarityKind::kCosine, true};
  CHECK(unnormalize(eye, stats) == sym(2, {4, 0, 0, 9}));
  b.kind = SimilarityKind::kGram;
  CHECK_THROWS_AS(unnormalize(b, stats), ContractError);
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(sym(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(spectral_norm(sym(2, {3, 0, 0, 1})) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(spectral_norm(sym(2, {2, -1, -1, 2})) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(spectral_norm(sym(2, {0, 5, 5, 0})) == doctest::Approx(5.0).epsilon(1e-10));
  // All-ones start is orthogonal to the dominant eigenvector here.
  CHECK(spectral_norm(sym(2, {1, -4, -4, 1})) == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(spectral_norm(DenseSymmetric(4)) == 0.0);

  SUBCASE("random 20x20 against the eigensolver oracle") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto full = oracle::random_symmetric(20, seed);
      const double got = spectral_norm(sym(20, full));
      CHECK(oracle::rel_close(got, max_abs_eig(full, 20), 1e-8));
    }
  }
}

TEST_CASE("symmetric_eig") {
  SUBCASE("diagonal") {
    const auto e = symmetric_eig(sym(3, {2, 0, 0, 0, 5, 0, 0, 0, 1}));
    CHECK(e.eigenvalues == std::vector<double>{5, 2, 1});
  }
  SUBCASE("[[2,1],[1,2]]") {
    const auto e = symmetric_eig(sym(2, {2, 1, 1, 2}));
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.vector(0)[0]) == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("random 30x30: residual, orthonormality, reconstruction, oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::size_t n = 30;
      const auto full = oracle::random_symmetric(n, 100 + seed);
      const auto m = sym(n, full);
      const auto e = symmetric_eig(m);
      const double scale = m.frobenius();
      const auto ref = oracle::eigenvalues_desc(full, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(e.eigenvalues[i] - ref[i]) <= 1e-10 * scale);
        if (i > 0) CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
        const auto v = e.vector(i);
        const auto mv = m.multiply(v);
        double resid = 0.0;
        for (std::size_t r = 0; r < n; ++r) resid = std::max(resid, std::abs(mv[r] - e.eigenvalues[i] * v[r]));
        CHECK(resid <= 1e-9 * scale);
        for (std::size_t k = 0; k < n; ++k) {
          double d = 0.0;
          for (std::size_t r = 0; r < n; ++r) d += v[r] * e.vector(k)[r];
          CHECK(std::abs(d - (i == k ? 1.0 : 0.0)) <= 1e-10);
        }
      }
      double worst = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += e.eigenvalues[i] * e.vector(i)[r] * e.vector(i)[c];
          worst = std::max(worst, std::abs(s - full[r * n + c]));
        }
      CHECK(worst <= 1e-10 * scale);
    }
  }
}

TEST_CASE("recover_singular_values") {
  const auto sv = recover_singular_values(sym(2, {4, 0, 0, 9}));
  CHECK(sv.sigma == std::vector<double>{3.0, 2.0});
  CHECK(sv.clamped_negative == 0);
  const auto neg = recover_singular_values(sym(2, {1, 0, 0, -0.25}));
  CHECK(neg.sigma == std::vector<double>{1.0, 0.0});
  CHECK(neg.clamped_negative == 1);

  SUBCASE("exact Gram gives the singular values of A") {
    const auto a = generate_random_sparse(200, 12, 5, ValueDist::kUniform01, 8);
    const auto got = recover_singular_values(exact_gram(a)).sigma;
    const auto ref = oracle::singular_values(a);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-8 * ref[0]);
  }
}

TEST_CASE("relative_spectral_error") {
  const auto eye = sym(2, {1, 0, 0, 1});
  CHECK(relative_spectral_error(eye, eye) == 0.0);
  CHECK(relative_spectral_error(sym(2, {1.1, 0, 0, 1}), eye) == doctest::Approx(0.1).epsilon(1e-8));
  CHECK_THROWS_AS(relative_spectral_error(eye, DenseSymmetric(2)), DegenerateInputError);
}

TEST_CASE("spectral norm inequalities") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = generate_random_sparse(100, 10, 4, ValueDist::kUniform01, seed);
    const auto g = exact_gram(a);
    const auto stats = column_stats(a);
    CHECK(spectral_norm(g) >= stats.max_norm() * stats.max_norm() * (1 - 1e-12));
    const auto b = sym(10, oracle::random_symmetric(10, seed));
    // ||G + B|| <= ||G|| + ||B||
    const auto sum = g - b.scaled(-1.0);
    CHECK(spectral_norm(sum) <= (spectral_norm(g) + spectral_norm(b)) * (1 + 1e-10));
  }
}
