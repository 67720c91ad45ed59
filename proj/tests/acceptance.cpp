// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// values, tolerance and wall time. Exit status is 0 iff every line passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dimsum/json_io.hpp"
#include "dimsum/pipelines.hpp"
#include "dimsum/spectral.hpp"
#include "dimsum/suites.hpp"
#include "dimsum/verify.hpp"
#include "oracles.hpp"

using namespace dimsum;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string checks_summary(const TrialReport& r) {
  std::string s;
  for (const auto& c : r.checks) {
    if (!s.empty()) s += "; ";
    s += c.name + " " + num(c.measured) + " " + c.op + " " + num(c.threshold);
  }
  return s;
}

Outcome from_report(const TrialReport& r) { return {r.pass && !r.skipped, checks_summary(r)}; }

// 1. Naive pipeline against the dense triple-loop Gram.
Outcome oracle_equivalence() {
  std::mt19937_64 gen(20240601);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 100 + gen() % 4901;
    const std::size_t n = 2 + gen() % 49;
    const std::size_t L = 1 + gen() % std::min<std::size_t>(10, n);
    const auto dist = t % 2 ? ValueDist::kUniform01 : ValueDist::kBinary;
    const auto a = generate_random_sparse(m, n, L, dist, gen());
    const auto got = run_naive(a).similarity.values;
    const auto ref = oracle::gram(a);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double scale = std::max(std::abs(ref[j][k]), 1e-300);
        worst = std::max(worst, std::abs(got(j, k) - ref[j][k]) / scale);
      }
  }
  return {worst <= 1e-12, "max relative deviation " + num(worst) + " <= 1e-12 over 50 matrices"};
}

// 2. Saturated samplers reproduce exact cosines in every run.
Outcome saturation_identity() {
  double worst = 0.0;
  double spread = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = generate_random_sparse(500 + 100 * s, 12, 4, s % 2 ? ValueDist::kUniform01 : ValueDist::kBinary, s);
    const auto stats = column_stats(a);
    const auto cos = oracle::cosines(a);
    for (auto mode : {SamplingMode::kDimsum, SamplingMode::kLean}) {
      const SamplingConfig cfg{saturation_gamma(stats) * 1.01, mode};
      std::vector<double> first;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        PipelineOptions opts;
        opts.seed = seed;
        opts.exact_diagonal = false;
        const auto b = run_sampled(a, stats, cfg, opts).similarity.values;
        const auto full = b.to_full();
        if (first.empty()) first = full;
        for (std::size_t idx = 0; idx < full.size(); ++idx) {
          worst = std::max(worst, std::abs(full[idx] - cos[idx / 12][idx % 12]));
          spread = std::max(spread, std::abs(full[idx] - first[idx]));
        }
      }
    }
  }
  return {worst <= 1e-10 && spread == 0.0,
          "max |b - cos| " + num(worst) + " <= 1e-10; max across-seed spread " + num(spread) +
              " == 0"};
}

// 3. Per-entry Monte Carlo means against oracle cosines on the moments instance.
Outcome unbiasedness() {
  const auto cfg = resolve_suite_config("moments", SuiteConfig{});
  const auto a = materialize(*cfg.matrix);
  const auto stats = column_stats(a);
  const auto cos = oracle::cosines(a);
  const std::size_t n = a.n_cols();
  const std::size_t trials = 2000;
  std::vector<double> sum(n * n, 0.0), sq(n * n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    PipelineOptions opts;
    opts.seed = derive_seed(0xacce55, t);
    opts.exact_diagonal = false;
    const auto full = run_sampled(a, stats, {*cfg.gamma, SamplingMode::kDimsum}, opts)
                          .similarity.values.to_full();
    for (std::size_t idx = 0; idx < full.size(); ++idx) {
      sum[idx] += full[idx];
      sq[idx] += full[idx] * full[idx];
    }
  }
  std::size_t entries = 0, within = 0;
  const double tn = static_cast<double>(trials);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      const std::size_t idx = j * n + k;
      const double mean = sum[idx] / tn;
      const double var = std::max(0.0, (sq[idx] - tn * mean * mean) / (tn - 1.0));
      const double se = std::sqrt(var / tn);
      ++entries;
      if (std::abs(mean - cos[j][k]) <= 4.0 * se + 1e-12) ++within;
    }
  const double frac = static_cast<double>(within) / static_cast<double>(entries);
  return {frac >= 0.99, num(within) + "/" + num(entries) + " entries within 4 SE (" + num(frac) +
                            " >= 0.99), raw diagonal included"};
}

Outcome suite(const char* name) {
  const auto r = run_suite(name, SuiteConfig{});
  return from_report(r);
}

Outcome moment_bounds() {
  const auto r = run_suite("moments", SuiteConfig{});
  auto o = from_report(r);
  o.detail += "; off-diagonal entries (diagonal exact). raw diagonal: var*gamma " +
              num(r.details.at("raw_diagonal_max_variance_times_gamma")) +
              ", m4*gamma^2/2 " +
              num(r.details.at("raw_diagonal_max_fourth_moment_times_gamma_sq_over_2"));
  return o;
}

Outcome chernoff() {
  const auto r = run_suite("chernoff", SuiteConfig{});
  auto o = from_report(r);
  o.detail += "; cosine " + num(r.details.at("cosine"));
  return o;
}

// 10. Unit-cosine pair count by brute force and through the suite.
Outcome lower_bound() {
  const std::pair<std::size_t, std::size_t> cases[] = {{6, 3}, {8, 2}, {12, 4}, {20, 5}};
  bool ok = true;
  std::string detail;
  for (auto [n, L] : cases) {
    const auto c = oracle::cosines(generate_lowerbound_dataset(n, L));
    std::size_t unit = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(c[i][j] - 1.0) <= 1e-12) ++unit;
    const std::size_t expected = (n / L) * L * (L - 1) / 2;
    const auto r = check_lowerbound_output(n, L);
    ok = ok && unit == expected && r.pass;
    detail += "(" + num(n) + "," + num(L) + "): " + num(unit) + "==" + num(expected) + " ";
  }
  return {ok, detail};
}

// 11. Singular values via the Gram path against an SVD of A itself.
Outcome spectral_recovery() {
  double worst_sigma = 0.0, worst_resid = 0.0, worst_orth = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = generate_random_sparse(200, 20, 8, ValueDist::kUniform01, 900 + seed);
    const auto g = exact_gram(a);
    const auto e = symmetric_eig(g);
    const auto sv = recover_singular_values(g);
    const auto ref = oracle::singular_values(a);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst_sigma = std::max(worst_sigma, std::abs(sv.sigma[i] - ref[i]) / ref[i]);
    }
    const double scale = g.frobenius();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto v = e.vector(i);
      const auto gv = g.multiply(v);
      for (std::size_t r = 0; r < v.size(); ++r)
        worst_resid = std::max(worst_resid, std::abs(gv[r] - e.eigenvalues[i] * v[r]) / scale);
      for (std::size_t k = 0; k < e.size(); ++k) {
        double d = 0.0;
        for (std::size_t r = 0; r < v.size(); ++r) d += v[r] * e.vector(k)[r];
        worst_orth = std::max(worst_orth, std::abs(d - (i == k ? 1.0 : 0.0)));
      }
    }
  }
  return {worst_sigma <= 1e-8 && worst_resid <= 1e-10 && worst_orth <= 1e-10,
          "sigma rel " + num(worst_sigma) + " <= 1e-8; residual/||G||_F " + num(worst_resid) +
              " <= 1e-10; orthonormality " + num(worst_orth) + " <= 1e-10"};
}

// 12. Every suite twice with one seed, compared as serialized reports.
Outcome determinism() {
  SuiteConfig cfg;
  cfg.seed = 12345;
  std::string differing;
  for (const auto& name : suite_names()) {
    const std::string first = Json(run_suite(name, cfg)).dump();
    const std::string second = Json(run_suite(name, cfg)).dump();
    if (first != second) differing += name + " ";
  }
  return {differing.empty(),
          differing.empty() ? "all " + num(suite_names().size()) + " suites bit-identical"
                            : "differ: " + differing};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", 10, oracle_equivalence},
      {2, "saturation identity", 5, saturation_identity},
      {3, "unbiasedness", 60, unbiasedness},
      {4, "moment bounds", 60, moment_bounds},
      {5, "success probability", 120, [] { return suite("success"); }},
      {6, "chernoff tails", 60, chernoff},
      {7, "shuffle size", 30, [] { return suite("shuffle"); }},
      {8, "dimension independence", 120, [] { return suite("dimfree"); }},
      {9, "reduce-key load", 30, [] { return suite("reducekey"); }},
      {10, "lower-bound pairs", 5, lower_bound},
      {11, "spectral recovery", 10, spectral_recovery},
      {12, "determinism", 60, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %2d %-24s %6.2fs/%gs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_seconds, o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
