#include "dimsum/suites.hpp"

#include <algorithm>

#include "dimsum/errors.hpp"
#include "dimsum/rng.hpp"

namespace dimsum {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"moments", "success",   "chernoff", "shuffle",
                                                 "dimfree", "reducekey", "lowerbound"};
  return names;
}

namespace {

std::size_t suite_index(const std::string& suite) {
  const auto& names = suite_names();
  const auto it = std::find(names.begin(), names.end(), suite);
  if (it == names.end()) throw ParameterError("unknown suite '" + suite + "'");
  return static_cast<std::size_t>(it - names.begin());
}

MatrixSpec generated(std::size_t m, std::size_t n, std::size_t L) {
  MatrixSpec spec;
  spec.m = m;
  spec.n = n;
  spec.L = L;
  return spec;
}

MatrixSpec lowerbound_spec(std::size_t n, std::size_t L) {
  MatrixSpec spec;
  spec.lowerbound = true;
  spec.m = n;
  spec.n = n;
  spec.L = L;
  return spec;
}

template <typename T>
void fill(std::optional<T>& slot, T value) {
  if (!slot) slot = value;
}

std::string dist_name(ValueDist d) { return d == ValueDist::kBinary ? "binary" : "uniform01"; }

ValueDist parse_dist(const std::string& s) {
  if (s == "binary") return ValueDist::kBinary;
  if (s == "uniform01" || s == "uniform") return ValueDist::kUniform01;
  throw ParameterError("unknown value distribution '" + s + "'");
}

template <typename T>
void read_opt(const Json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

SuiteConfig suite_config_from_json(const Json& j) {
  SuiteConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  read_opt(j, "gamma", cfg.gamma);
  read_opt(j, "epsilon", cfg.epsilon);
  read_opt(j, "c", cfg.c);
  read_opt(j, "alpha", cfg.alpha);
  read_opt(j, "delta", cfg.delta);
  read_opt(j, "trials", cfg.trials);
  read_opt(j, "n", cfg.n);
  read_opt(j, "L", cfg.L);
  read_opt(j, "i", cfg.i);
  read_opt(j, "j", cfg.j);
  if (j.contains("m_values")) cfg.m_values = j.at("m_values").get<std::vector<std::size_t>>();
  cfg.threads = j.value("threads", std::size_t{1});
  cfg.exact_diagonal = j.value("exact_diagonal", true);
  if (cfg.gamma && (cfg.epsilon || cfg.c)) {
    throw ParameterError("config gives both gamma and (epsilon, c)");
  }
  if (j.contains("matrix")) {
    const auto& mj = j.at("matrix");
    MatrixSpec spec;
    if (mj.contains("path")) spec.path = mj.at("path").get<std::string>();
    if (mj.contains("format")) spec.format = parse_matrix_format(mj.at("format").get<std::string>());
    spec.lowerbound = mj.value("lowerbound", false);
    spec.m = mj.value("m", std::size_t{0});
    spec.n = mj.value("n", std::size_t{0});
    spec.L = mj.value("L", std::size_t{0});
    if (mj.contains("dist")) spec.dist = parse_dist(mj.at("dist").get<std::string>());
    read_opt(mj, "seed", spec.seed);
    if (spec.lowerbound) spec.m = spec.n;
    cfg.matrix = spec;
  }
  return cfg;
}

SuiteConfig resolve_suite_config(const std::string& suite, SuiteConfig cfg) {
  const std::uint64_t suite_seed = derive_seed(cfg.seed, suite_index(suite));
  if (suite == "moments") {
    fill(cfg.matrix, generated(2000, 30, 6));
    fill(cfg.gamma, 50.0);
    fill(cfg.trials, std::size_t{2000});
  } else if (suite == "success") {
    fill(cfg.matrix, generated(5000, 40, 8));
    fill(cfg.epsilon, 0.5);
    fill(cfg.c, kDefaultCalibration);
    fill(cfg.trials, std::size_t{100});
  } else if (suite == "chernoff") {
    fill(cfg.matrix, lowerbound_spec(200, 100));
    fill(cfg.alpha, 20.0);
    fill(cfg.delta, 0.5);
    fill(cfg.i, std::size_t{0});
    fill(cfg.j, std::size_t{1});
    fill(cfg.trials, std::size_t{10000});
  } else if (suite == "shuffle") {
    fill(cfg.matrix, generated(5000, 50, 10));
    fill(cfg.gamma, 100.0);
    fill(cfg.trials, std::size_t{200});
  } else if (suite == "dimfree") {
    fill(cfg.n, std::size_t{50});
    fill(cfg.L, std::size_t{10});
    fill(cfg.gamma, 100.0);
    fill(cfg.trials, std::size_t{3});
    if (cfg.m_values.empty()) cfg.m_values = {1000, 10000, 100000};
  } else if (suite == "reducekey") {
    fill(cfg.matrix, generated(5000, 50, 10));
    fill(cfg.gamma, 30.0);
    fill(cfg.trials, std::size_t{100});
  } else if (suite == "lowerbound") {
    fill(cfg.n, std::size_t{6});
    fill(cfg.L, std::size_t{3});
  }
  if (cfg.matrix && !cfg.matrix->path && !cfg.matrix->seed) {
    cfg.matrix->seed = derive_seed(suite_seed, 1);
  }
  return cfg;
}

Json suite_config_json(const std::string& suite, const SuiteConfig& r) {
  Json j{{"suite", suite}, {"seed", r.seed}, {"threads", r.threads},
         {"exact_diagonal", r.exact_diagonal}};
  auto put = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("gamma", r.gamma);
  put("epsilon", r.epsilon);
  put("c", r.c);
  put("alpha", r.alpha);
  put("delta", r.delta);
  put("trials", r.trials);
  put("n", r.n);
  put("L", r.L);
  put("i", r.i);
  put("j", r.j);
  if (!r.m_values.empty()) j["m_values"] = r.m_values;
  if (r.gamma) {
    j["resolved_gamma"] = *r.gamma;
  } else if (r.epsilon && r.c && r.matrix) {
    j["resolved_gamma"] = *r.c * static_cast<double>(r.matrix->n) / (*r.epsilon * *r.epsilon);
  }
  if (r.matrix) {
    const auto& m = *r.matrix;
    Json mj;
    if (m.path) {
      mj["path"] = *m.path;
      mj["format"] = m.format == MatrixFormat::kMatrixMarket ? "mm" : "tsv";
    } else {
      mj = Json{{"lowerbound", m.lowerbound}, {"m", m.m}, {"n", m.n}, {"L", m.L},
                {"dist", dist_name(m.dist)}};
      if (m.seed) mj["seed"] = *m.seed;
    }
    j["matrix"] = mj;
  }
  return j;
}

SparseRowMatrix materialize(const MatrixSpec& spec) {
  if (spec.path) return scale_entries(load_matrix(*spec.path, spec.format)).matrix;
  if (spec.lowerbound) return generate_lowerbound_dataset(spec.n, spec.L);
  return generate_random_sparse(spec.m, spec.n, spec.L, spec.dist, spec.seed.value_or(0));
}

TrialReport run_suite(const std::string& suite, const SuiteConfig& raw) {
  const auto cfg = resolve_suite_config(suite, raw);
  const std::uint64_t trial_seed = derive_seed(derive_seed(cfg.seed, suite_index(suite)), 2);
  SuiteOptions options;
  options.threads = cfg.threads;
  options.exact_diagonal = cfg.exact_diagonal;

  if (suite == "lowerbound") return check_lowerbound_output(*cfg.n, *cfg.L);
  if (suite == "dimfree") {
    return check_dimension_independence(*cfg.n, *cfg.L, *cfg.gamma, cfg.m_values, *cfg.trials,
                                        trial_seed, options);
  }
  const auto a = materialize(*cfg.matrix);
  if (suite == "moments") return check_moment_bounds(a, *cfg.gamma, *cfg.trials, trial_seed, options);
  if (suite == "success") {
    if (cfg.gamma) {
      throw ParameterError("success: give (epsilon, c), not gamma");
    }
    return check_success_probability(a, *cfg.epsilon, *cfg.c, *cfg.trials, trial_seed, options);
  }
  if (suite == "chernoff") {
    return check_chernoff_tails(a, *cfg.i, *cfg.j, *cfg.alpha, *cfg.delta, *cfg.trials, trial_seed,
                                cfg.epsilon, options);
  }
  if (suite == "shuffle") return check_shuffle_size(a, *cfg.gamma, *cfg.trials, trial_seed, options);
  if (suite == "reducekey") return check_reduce_key(a, *cfg.gamma, *cfg.trials, trial_seed, options);
  throw ParameterError("unknown suite '" + suite + "'");
}

}  // namespace dimsum
