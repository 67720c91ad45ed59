#include "dimsum/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "dimsum/errors.hpp"
#include "dimsum/rng.hpp"
#include "dimsum/spectral.hpp"

namespace dimsum {

Check make_check(std::string name, double measured, std::string op, double threshold) {
  bool pass = false;
  if (op == "<=") {
    pass = measured <= threshold;
  } else if (op == ">=") {
    pass = measured >= threshold;
  } else if (op == "==") {
    pass = measured == threshold;
  } else {
    throw ParameterError("unknown comparison '" + op + "'");
  }
  return {std::move(name), measured, std::move(op), threshold, pass};
}

void TrialReport::finalize() {
  pass = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ParameterError("slope undefined for constant x");
  return sxy / sxx;
}

namespace {

void require_unit_range(const SparseRowMatrix& a, const std::string& suite) {
  if (a.nnz() == 0) throw DegenerateInputError(suite + ": matrix has no nonzeros");
  if (a.max_abs() > 1.0) {
    throw PreconditionError(suite + ": entries must be scaled into [-1, 1] first (max |a| = " +
                            std::to_string(a.max_abs()) + ")");
  }
}

void require_nonnegative(const SparseRowMatrix& a, const std::string& suite) {
  require_unit_range(a, suite);
  if (!a.is_nonnegative()) {
    throw RegimeError(suite + ": requires entries in [0, 1]; matrix has negative entries");
  }
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, std::size_t trials) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t t = 0; t < trials; ++t) seeds[t] = derive_seed(seed, t);
  return seeds;
}

void mean_var(const std::vector<double>& xs, double& mean, double& var) {
  mean = 0.0;
  var = 0.0;
  if (xs.empty()) return;
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
}

PipelineOptions trial_options(std::uint64_t seed, const SuiteOptions& options) {
  PipelineOptions p;
  p.seed = seed;
  p.threads = 1;
  p.exact_diagonal = options.exact_diagonal;
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

TrialReport check_success_probability(const SparseRowMatrix& a, double epsilon, double c,
                                      std::size_t trials, std::uint64_t seed,
                                      const SuiteOptions& options) {
  require_unit_range(a, "success");
  if (trials == 0) throw ParameterError("success: trials must be positive");
  const double gamma = gamma_for_epsilon(a.n_cols(), epsilon, c);
  if (gamma < 1.0) {
    throw ParameterError("success: gamma = c n / eps^2 = " + fmt(gamma) + " is below 1");
  }
  const auto stats = column_stats(a);
  const auto truth = exact_gram(a);
  const double truth_norm = spectral_norm(truth);
  if (truth_norm == 0.0) throw DegenerateInputError("success: A^T A has zero spectral norm");

  TrialReport report;
  report.suite = "success";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);
  report.bound_value = epsilon;

  std::vector<double> errors(trials);
  const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
  parallel_for(trials, options.threads, [&](std::size_t t) {
    auto run = run_sampled(a, stats, cfg, trial_options(report.seeds[t], options));
    const auto estimate = unnormalize(run.similarity, stats);
    errors[t] = spectral_norm(estimate - truth) / truth_norm;
  });
  report.successes = static_cast<std::size_t>(
      std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= epsilon; }));
  mean_var(errors, report.statistic_mean, report.statistic_var);

  const double rate = static_cast<double>(report.successes) / static_cast<double>(trials);
  const double floor_rate = 0.5 - 3.0 * std::sqrt(0.25 / static_cast<double>(trials));
  report.checks.push_back(make_check("success_rate", rate, ">=", floor_rate));
  const double c_star = stats.max_norm();
  report.checks.push_back(
      make_check("gram_norm_over_max_column_norm_sq", truth_norm / (c_star * c_star), ">=", 1.0));

  report.details["gamma"] = gamma;
  report.details["c"] = c;
  report.details["epsilon"] = epsilon;
  report.details["gram_spectral_norm"] = truth_norm;
  report.details["max_error"] = *std::max_element(errors.begin(), errors.end());
  report.notes = "trial succeeds iff ||DBD - A^T A||_2 / ||A^T A||_2 <= epsilon";
  report.finalize();
  return report;
}

TrialReport check_calibration_trend(const SparseRowMatrix& a, double epsilon,
                                    const std::vector<double>& c_values, std::size_t trials,
                                    std::uint64_t seed, const SuiteOptions& options) {
  if (c_values.size() < 2) throw ParameterError("calibration: need at least two c values");
  if (!std::is_sorted(c_values.begin(), c_values.end())) {
    throw ParameterError("calibration: c values must be ascending");
  }
  TrialReport report;
  report.suite = "calibration";
  report.trials = trials;
  report.seed = seed;
  report.bound_value = epsilon;

  std::vector<double> rates;
  for (std::size_t idx = 0; idx < c_values.size(); ++idx) {
    // Same seed for every c: the comparison is between configurations, not draws.
    const auto r = check_success_probability(a, epsilon, c_values[idx], trials, seed, options);
    const double rate = static_cast<double>(r.successes) / static_cast<double>(trials);
    rates.push_back(rate);
    const std::string tag = "c=" + fmt(c_values[idx]);
    report.details["success_rate_" + tag] = rate;
    report.details["mean_error_" + tag] = r.statistic_mean;
    report.details["gamma_" + tag] = r.details.at("gamma");
  }
  // Largest drop from any c to a larger one.
  double worst_drop = 0.0;
  for (std::size_t p = 0; p < rates.size(); ++p)
    for (std::size_t q = p + 1; q < rates.size(); ++q) worst_drop = std::max(worst_drop, rates[p] - rates[q]);
  report.successes = static_cast<std::size_t>(std::round(rates.back() * static_cast<double>(trials)));
  report.statistic_mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  // Three standard errors of a difference of two rates at p = 1/2.
  report.checks.push_back(make_check("largest_rate_drop", worst_drop, "<=",
                                     3.0 * std::sqrt(0.5 / static_cast<double>(trials))));
  report.notes = "success rate at each c; a larger c may not lower it beyond sampling noise";
  report.finalize();
  return report;
}

TrialReport check_moment_bounds(const SparseRowMatrix& a, double gamma, std::size_t trials,
                                std::uint64_t seed, const SuiteOptions& options) {
  require_nonnegative(a, "moments");
  if (gamma < 1.0) throw ParameterError("moments: gamma must be >= 1, got " + fmt(gamma));
  if (trials < 2) throw ParameterError("moments: need at least 2 trials");
  const std::size_t n = a.n_cols();
  const auto stats = column_stats(a);

  TrialReport report;
  report.suite = "moments";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);
  report.bound_value = 1.0 / gamma;

  // samples[t * slots + s]: raw estimate of upper-triangle slot s in trial t.
  const std::size_t slots = n * (n + 1) / 2;
  std::vector<double> samples(trials * slots);
  const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
  SuiteOptions raw = options;
  raw.exact_diagonal = false;
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const auto run = run_sampled(a, stats, cfg, trial_options(report.seeds[t], raw));
    double* dst = samples.data() + t * slots;
    for (std::size_t i = 0, s = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j, ++s) dst[s] = run.similarity.values(i, j);
  });

  const double tn = static_cast<double>(trials);
  const double slack = 1.0 + 6.0 / std::sqrt(tn);
  double max_var_ratio = 0.0, max_m4_ratio = 0.0;
  double diag_var_ratio = 0.0, diag_m4_ratio = 0.0;
  double var_sum = 0.0, m4_sum = 0.0;
  for (std::size_t i = 0, s = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++s) {
      double mean = 0.0;
      for (std::size_t t = 0; t < trials; ++t) mean += samples[t * slots + s];
      mean /= tn;
      double m2 = 0.0, m4 = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double d = samples[t * slots + s] - mean;
        m2 += d * d;
        m4 += d * d * d * d;
      }
      const double var = m2 / (tn - 1.0);
      m4 /= tn;
      const double var_ratio = var * gamma;
      const double m4_ratio = m4 * gamma * gamma / 2.0;
      if (i == j) {
        diag_var_ratio = std::max(diag_var_ratio, var_ratio);
        diag_m4_ratio = std::max(diag_m4_ratio, m4_ratio);
        // An exact diagonal is a constant; its central moments are zero.
        if (options.exact_diagonal) continue;
      }
      var_sum += var;
      m4_sum += m4;
      max_var_ratio = std::max(max_var_ratio, var_ratio);
      max_m4_ratio = std::max(max_m4_ratio, m4_ratio);
    }
  }
  report.statistic_mean = var_sum / static_cast<double>(slots);
  report.statistic_var = m4_sum / static_cast<double>(slots);
  report.successes = trials;
  report.checks.push_back(make_check("max_variance_times_gamma", max_var_ratio, "<=", slack));
  report.checks.push_back(
      make_check("max_fourth_moment_times_gamma_sq_over_2", max_m4_ratio, "<=", slack));
  report.details["gamma"] = gamma;
  report.details["slack"] = slack;
  report.details["exact_diagonal"] = options.exact_diagonal ? 1.0 : 0.0;
  report.details["raw_diagonal_max_variance_times_gamma"] = diag_var_ratio;
  report.details["raw_diagonal_max_fourth_moment_times_gamma_sq_over_2"] = diag_m4_ratio;
  report.notes =
      "statistic_mean/statistic_var hold the entry-averaged variance/fourth central moment";
  report.finalize();
  return report;
}

TrialReport check_chernoff_tails(const SparseRowMatrix& a, std::size_t i, std::size_t j,
                                 double alpha, double delta, std::size_t trials,
                                 std::uint64_t seed, std::optional<double> epsilon,
                                 const SuiteOptions& options) {
  require_nonnegative(a, "chernoff");
  const std::size_t n = a.n_cols();
  if (i >= n || j >= n || i == j) {
    throw ParameterError("chernoff: need two distinct columns below n=" + std::to_string(n));
  }
  if (!(alpha > 0.0) || !(delta >= 0.0) || delta >= 1.0) {
    throw ParameterError("chernoff: need alpha > 0 and 0 <= delta < 1");
  }
  if (trials == 0) throw ParameterError("chernoff: trials must be positive");
  if (i > j) std::swap(i, j);
  const auto stats = column_stats(a);

  // Exact dot product and cosine of the pair.
  double dot = 0.0;
  std::vector<SparseRow> shared;  // rows where both columns are nonzero, projected onto them
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    const auto row = a.row(r);
    const Entry* ei = nullptr;
    const Entry* ej = nullptr;
    for (const auto& e : row) {
      if (e.col == i) ei = &e;
      if (e.col == j) ej = &e;
    }
    if (ei && ej) {
      dot += ei->value * ej->value;
      shared.push_back({*ei, *ej});
    }
  }
  const double norms = stats.norms[i] * stats.norms[j];
  const double cosine = norms > 0.0 ? dot / norms : 0.0;
  const double eps = epsilon.value_or(cosine);
  if (!(eps > 0.0) || cosine < eps) {
    throw PreconditionError("chernoff: cos(c_" + std::to_string(i) + ", c_" + std::to_string(j) +
                            ") = " + fmt(cosine) + " is below epsilon = " + fmt(eps));
  }
  const double gamma = alpha / eps;

  // Rows without both columns cannot emit the (i, j) key, and each pair
  // draws its own uniform, so the projected job has the same law for b_ij.
  const std::size_t shared_rows = shared.size();
  const SparseRowMatrix projected(shared_rows, n, std::move(shared));

  TrialReport report;
  report.suite = "chernoff";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);

  std::vector<double> estimates(trials);
  const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
  SuiteOptions raw = options;
  raw.exact_diagonal = false;
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const auto run = run_sampled(projected, stats, cfg, trial_options(report.seeds[t], raw));
    estimates[t] = norms * run.similarity.values(i, j);
  });

  std::size_t upper = 0, lower = 0;
  for (double est : estimates) {
    if (est > (1.0 + delta) * dot) ++upper;
    if (est < (1.0 - delta) * dot) ++lower;
  }
  const double tn = static_cast<double>(trials);
  TailCheck tail;
  tail.delta = delta;
  tail.alpha = alpha;
  tail.empirical_upper_tail = static_cast<double>(upper) / tn;
  tail.empirical_lower_tail = static_cast<double>(lower) / tn;
  tail.chernoff_upper = std::pow(std::exp(delta) / std::pow(1.0 + delta, 1.0 + delta), alpha);
  tail.chernoff_lower = std::exp(-alpha * delta * delta / 2.0);

  const auto se = [tn](double p) { return std::sqrt(p * (1.0 - p) / tn); };
  report.checks.push_back(make_check("upper_tail", tail.empirical_upper_tail, "<=",
                                     tail.chernoff_upper + 3.0 * se(tail.chernoff_upper)));
  report.checks.push_back(make_check("lower_tail", tail.empirical_lower_tail, "<=",
                                     tail.chernoff_lower + 3.0 * se(tail.chernoff_lower)));
  report.successes = trials - static_cast<std::size_t>(
                                  std::count_if(estimates.begin(), estimates.end(), [&](double e) {
                                    return e > (1.0 + delta) * dot || e < (1.0 - delta) * dot;
                                  }));
  mean_var(estimates, report.statistic_mean, report.statistic_var);
  report.bound_value = tail.chernoff_upper;
  report.tail = tail;
  report.details["gamma"] = gamma;
  report.details["epsilon"] = eps;
  report.details["cosine"] = cosine;
  report.details["gram_entry"] = dot;
  report.details["i"] = static_cast<double>(i);
  report.details["j"] = static_cast<double>(j);
  report.notes = "statistic is the estimator ||c_i|| ||c_j|| b_ij of [A^T A]_ij";
  report.finalize();
  return report;
}

ShuffleExpectation expected_shuffle(const SparseRowMatrix& a, const ColumnStats& stats,
                                    double gamma) {
  ShuffleExpectation out;
  std::unordered_map<std::uint64_t, double> per_key;
  const std::uint64_t n = a.n_cols();
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t p = 0; p < row.size(); ++p) {
      for (std::size_t q = p; q < row.size(); ++q) {
        const double prob =
            dimsum_probability(gamma, stats.norms[row[p].col], stats.norms[row[q].col]);
        out.mean += prob;
        out.variance += prob * (1.0 - prob);
        per_key[row[p].col * n + row[q].col] += prob;
      }
    }
  }
  for (const auto& [key, value] : per_key) out.max_key_mean = std::max(out.max_key_mean, value);
  return out;
}

TrialReport check_shuffle_size(const SparseRowMatrix& a, double gamma, std::size_t trials,
                               std::uint64_t seed, const SuiteOptions& options) {
  require_nonnegative(a, "shuffle");
  if (!(gamma >= 0.0)) throw ParameterError("shuffle: gamma must be non-negative");
  if (trials == 0) throw ParameterError("shuffle: trials must be positive");
  const auto stats = column_stats(a);

  TrialReport report;
  report.suite = "shuffle";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);

  const double L = static_cast<double>(a.max_row_nnz());
  const double bound =
      static_cast<double>(a.n_cols()) * L * gamma / (stats.h_min * stats.h_min);
  report.bound_value = bound;
  const auto expectation = expected_shuffle(a, stats, gamma);

  std::vector<double> sizes(trials);
  const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
  parallel_for(trials, options.threads, [&](std::size_t t) {
    sizes[t] = static_cast<double>(
        run_sampled(a, stats, cfg, trial_options(report.seeds[t], options)).stats.shuffle_size);
  });
  mean_var(sizes, report.statistic_mean, report.statistic_var);
  report.successes = trials;

  const double sd_of_mean = std::sqrt(expectation.variance / static_cast<double>(trials));
  if (sd_of_mean > 0.0) {
    report.checks.push_back(make_check("mean_deviation_in_sd",
                                       std::abs(report.statistic_mean - expectation.mean) /
                                           sd_of_mean,
                                       "<=", 4.0));
  } else {
    report.checks.push_back(
        make_check("mean_equals_expectation", report.statistic_mean, "==", expectation.mean));
  }
  report.checks.push_back(make_check("expectation_vs_nLgamma_over_H2", expectation.mean, "<=", bound));
  report.details["gamma"] = gamma;
  report.details["expected_shuffle"] = expectation.mean;
  report.details["expected_shuffle_variance"] = expectation.variance;
  report.details["L"] = L;
  report.details["H"] = stats.h_min;
  if (gamma == 0.0) {
    report.skipped = true;
    report.notes = "gamma = 0: no emissions possible, suite is vacuous";
  } else {
    report.notes = "expectation is sum over rows and pairs j <= k of min(1, gamma/(|c_j||c_k|))";
  }
  report.finalize();
  return report;
}

TrialReport check_dimension_independence(std::size_t n, std::size_t L, double gamma,
                                         const std::vector<std::size_t>& m_values,
                                         std::size_t trials, std::uint64_t seed,
                                         const SuiteOptions& options) {
  if (m_values.size() < 2) throw ParameterError("dimfree: need at least two m values");
  for (std::size_t i = 1; i < m_values.size(); ++i) {
    if (m_values[i] <= m_values[i - 1]) throw ParameterError("dimfree: m values must increase");
  }
  if (trials == 0) throw ParameterError("dimfree: trials must be positive");

  TrialReport report;
  report.suite = "dimfree";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);
  if (gamma == 0.0) {
    report.skipped = true;
    report.notes = "gamma = 0: every shuffle is empty and the slope is undefined; skipped";
    report.finalize();
    return report;
  }

  std::vector<double> log_m, log_dimsum, log_naive, dimsum_means;
  for (std::size_t idx = 0; idx < m_values.size(); ++idx) {
    const std::size_t m = m_values[idx];
    const auto a = generate_random_sparse(m, n, L, ValueDist::kBinary, derive_seed(seed, 1000 + idx));
    const auto stats = column_stats(a);
    std::vector<double> sizes(trials);
    const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
    parallel_for(trials, options.threads, [&](std::size_t t) {
      sizes[t] = static_cast<double>(
          run_sampled(a, stats, cfg, trial_options(report.seeds[t], options)).stats.shuffle_size);
    });
    double mean = 0.0, var = 0.0;
    mean_var(sizes, mean, var);
    PipelineOptions naive_opts;
    naive_opts.threads = options.threads;
    const double naive = static_cast<double>(run_naive(a, naive_opts).stats.shuffle_size);

    const std::string tag = "m=" + std::to_string(m);
    report.details["dimsum_mean_shuffle_" + tag] = mean;
    report.details["naive_shuffle_" + tag] = naive;
    log_m.push_back(std::log(static_cast<double>(m)));
    log_dimsum.push_back(std::log(std::max(mean, 1e-300)));
    log_naive.push_back(std::log(naive));
    dimsum_means.push_back(mean);
  }
  const double dimsum_slope = fit_slope(log_m, log_dimsum);
  const double naive_slope = fit_slope(log_m, log_naive);
  const auto [lo, hi] = std::minmax_element(dimsum_means.begin(), dimsum_means.end());
  const double centre = std::accumulate(dimsum_means.begin(), dimsum_means.end(), 0.0) /
                        static_cast<double>(dimsum_means.size());

  report.statistic_mean = dimsum_slope;
  report.successes = trials;
  report.checks.push_back(make_check("abs_dimsum_slope", std::abs(dimsum_slope), "<=", 0.1));
  report.checks.push_back(make_check("abs_naive_slope_minus_1", std::abs(naive_slope - 1.0), "<=", 0.1));
  report.details["dimsum_slope"] = dimsum_slope;
  report.details["naive_slope"] = naive_slope;
  report.details["dimsum_relative_spread"] = centre > 0.0 ? (*hi - *lo) / centre : 0.0;
  report.details["gamma"] = gamma;
  report.details["n"] = static_cast<double>(n);
  report.details["L"] = static_cast<double>(L);
  report.notes = "least-squares slope of log shuffle size against log m";
  report.finalize();
  return report;
}

TrialReport check_reduce_key(const SparseRowMatrix& a, double gamma, std::size_t trials,
                             std::uint64_t seed, const SuiteOptions& options) {
  require_nonnegative(a, "reducekey");
  if (!(gamma >= 0.0)) throw ParameterError("reducekey: gamma must be non-negative");
  if (trials == 0) throw ParameterError("reducekey: trials must be positive");
  const auto stats = column_stats(a);
  const double bound = gamma / (stats.h_min * stats.h_min);

  TrialReport report;
  report.suite = "reducekey";
  report.trials = trials;
  report.seed = seed;
  report.seeds = trial_seeds(seed, trials);
  report.bound_value = bound;

  std::vector<double> key_means(trials), key_maxes(trials);
  const SamplingConfig cfg{gamma, SamplingMode::kDimsum};
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const auto s = run_sampled(a, stats, cfg, trial_options(report.seeds[t], options)).stats;
    key_means[t] = s.reduce_key_mean;
    key_maxes[t] = static_cast<double>(s.reduce_key_max);
  });
  mean_var(key_means, report.statistic_mean, report.statistic_var);
  double max_mean = 0.0, max_var = 0.0;
  mean_var(key_maxes, max_mean, max_var);
  const auto expectation = expected_shuffle(a, stats, gamma);
  report.successes = trials;

  report.checks.push_back(make_check("mean_values_per_key", report.statistic_mean, "<=", bound));
  // Diagonal keys of binary columns meet the bound with equality, so the
  // summed expectation gets a rounding allowance.
  report.checks.push_back(make_check("largest_expected_key_load", expectation.max_key_mean, "<=",
                                     bound * (1.0 + 1e-9)));
  report.details["gamma"] = gamma;
  report.details["H"] = stats.h_min;
  report.details["mean_reduce_key_max"] = max_mean;
  if (gamma == 0.0) {
    report.skipped = true;
    report.notes = "gamma = 0: no keys are emitted, bound holds vacuously";
  } else {
    report.notes = "statistic is reduce_key_mean averaged over trials";
  }
  report.finalize();
  return report;
}

TrialReport check_lowerbound_output(std::size_t n, std::size_t L) {
  const auto a = generate_lowerbound_dataset(n, L);
  const auto gram = exact_gram(a);

  std::size_t unit_pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double denom = std::sqrt(gram(i, i)) * std::sqrt(gram(j, j));
      if (denom > 0.0 && std::abs(gram(i, j) / denom - 1.0) <= 1e-12) ++unit_pairs;
    }
  }
  const double expected = static_cast<double>(n / L) * static_cast<double>(L * (L - 1) / 2);

  // Saturated DIMSUM must output every one of these pairs.
  const auto stats = column_stats(a);
  const auto run = run_sampled(a, stats, {saturation_gamma(stats), SamplingMode::kDimsum});
  std::size_t output_keys = 0;
  for (const auto& kv : run.keyed) {
    if (kv.key.j != kv.key.k && kv.value >= 1.0 - 1e-12) ++output_keys;
  }

  TrialReport report;
  report.suite = "lowerbound";
  report.trials = 1;
  report.successes = 1;
  report.bound_value = expected;
  report.statistic_mean = static_cast<double>(unit_pairs);
  report.checks.push_back(make_check("unit_cosine_pairs", static_cast<double>(unit_pairs), "==", expected));
  report.checks.push_back(
      make_check("saturated_pipeline_unit_keys", static_cast<double>(output_keys), ">=", expected));
  report.details["n"] = static_cast<double>(n);
  report.details["L"] = static_cast<double>(L);
  report.details["shuffle_size"] = static_cast<double>(run.stats.shuffle_size);
  report.notes = "expected count is (n/L) * L(L-1)/2";
  report.finalize();
  return report;
}

}  // namespace dimsum
