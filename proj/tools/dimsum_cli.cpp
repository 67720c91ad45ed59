// dimsum: generate matrices, run the similarity pipelines, recover singular
// values and run the verification suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dimsum/errors.hpp"
#include "dimsum/json_io.hpp"
#include "dimsum/matrix.hpp"
#include "dimsum/mr_engine.hpp"
#include "dimsum/pipelines.hpp"
#include "dimsum/rng.hpp"
#include "dimsum/spectral.hpp"
#include "dimsum/suites.hpp"
#include "dimsum/verify.hpp"

namespace fs = std::filesystem;
using namespace dimsum;

namespace {

struct InputArgs {
  std::string input;
  std::string format = "mm";
  bool lowerbound = false;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t L = 0;
  bool uniform = false;
  std::uint64_t gen_seed = 0;
};

void add_input_options(CLI::App* cmd, InputArgs& in, bool with_file) {
  if (with_file) {
    cmd->add_option("--input,-i", in.input, "Matrix file to load");
    cmd->add_option("--format", in.format, "Input format: mm or tsv")->capture_default_str();
  }
  cmd->add_flag("--lowerbound", in.lowerbound, "Generate the lower-bound dataset (needs --n, --L)");
  cmd->add_option("--m", in.m, "Rows of the generated matrix");
  cmd->add_option("--n", in.n, "Columns of the generated matrix");
  cmd->add_option("--L", in.L, "Nonzeros per row (or group size with --lowerbound)");
  cmd->add_flag("--uniform", in.uniform, "Uniform (0,1] values instead of binary");
  cmd->add_flag("--binary", [&](std::int64_t) { in.uniform = false; }, "Binary values (default)");
}

Json input_json(const InputArgs& in) {
  if (!in.input.empty()) return Json{{"path", in.input}, {"format", in.format}};
  if (in.lowerbound) return Json{{"lowerbound", true}, {"n", in.n}, {"L", in.L}};
  return Json{{"m", in.m}, {"n", in.n}, {"L", in.L},
              {"dist", in.uniform ? "uniform01" : "binary"}, {"seed", in.gen_seed}};
}

SparseRowMatrix obtain_matrix(const InputArgs& in) {
  if (!in.input.empty()) return load_matrix(in.input, parse_matrix_format(in.format));
  if (in.lowerbound) return generate_lowerbound_dataset(in.n, in.L);
  if (in.m == 0 || in.n == 0 || in.L == 0) {
    throw ParameterError("give --input or generator sizes --m, --n, --L");
  }
  return generate_random_sparse(in.m, in.n, in.L,
                                in.uniform ? ValueDist::kUniform01 : ValueDist::kBinary,
                                in.gen_seed);
}

void echo_config(const Json& cfg) { std::cerr << "effective config: " << cfg.dump() << '\n'; }

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  InputArgs in;
  std::string out;
  std::string out_format = "mm";
};

int cmd_generate(const GenerateArgs& g) {
  Json cfg{{"command", "generate"}, {"matrix", input_json(g.in)}, {"out", g.out},
           {"out_format", g.out_format}};
  echo_config(cfg);
  const auto a = obtain_matrix(g.in);
  write_matrix(fs::path(g.out), a, parse_matrix_format(g.out_format));
  std::cout << "m=" << a.n_rows() << " n=" << a.n_cols() << " L=" << a.max_row_nnz()
            << " nnz=" << a.nnz() << " H=" << a.min_abs_nonzero() << '\n';
  return 0;
}

// --------------------------------------------------------------------- run

struct RunArgs {
  InputArgs in;
  std::string algorithm = "dimsum";
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> c;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool raw_diagonal = false;
  std::string out;
  std::string out_format = "mm";
  std::string gram_out;
  std::string stats_out;
  std::string meta_out;
  std::string emission_log;
};

struct PipelineRun {
  ScaledMatrix scaled;
  ColumnStats stats;
  std::optional<double> gamma;
  PipelineResult result;
  Json config;
};

std::optional<double> resolve_gamma(const RunArgs& r, std::size_t n) {
  if (r.algorithm == "naive") {
    if (r.gamma || r.epsilon || r.c) throw ParameterError("naive takes no gamma/epsilon/c");
    return std::nullopt;
  }
  if (r.algorithm != "dimsum" && r.algorithm != "lean") {
    throw ParameterError("unknown algorithm '" + r.algorithm + "'");
  }
  if (r.gamma && (r.epsilon || r.c)) throw ParameterError("--gamma excludes --epsilon/--c");
  if (r.gamma) return *r.gamma;
  if (r.c && !r.epsilon) throw ParameterError("--c needs --epsilon");
  if (!r.epsilon) throw ParameterError(r.algorithm + " needs --gamma or --epsilon");
  return gamma_for_epsilon(n, *r.epsilon, r.c.value_or(kDefaultCalibration));
}

PipelineRun execute(const RunArgs& r, const std::string& command) {
  PipelineRun run;
  run.scaled = scale_entries(obtain_matrix(r.in));
  const auto& a = run.scaled.matrix;
  run.gamma = resolve_gamma(r, a.n_cols());

  run.config = Json{{"command", command},      {"matrix", input_json(r.in)},
                    {"algorithm", r.algorithm}, {"seed", r.seed},
                    {"threads", r.threads},     {"exact_diagonal", !r.raw_diagonal},
                    {"scale_factor", run.scaled.scale_factor}};
  if (run.gamma) run.config["gamma"] = *run.gamma;
  if (r.epsilon) {
    run.config["epsilon"] = *r.epsilon;
    run.config["c"] = r.c.value_or(kDefaultCalibration);
  }
  echo_config(run.config);

  PipelineOptions opts;
  opts.seed = r.seed;
  opts.threads = r.threads;
  opts.exact_diagonal = !r.raw_diagonal;
  opts.keep_emission_log = !r.emission_log.empty();

  run.stats = column_stats(a);
  if (r.algorithm == "naive") {
    run.result = run_naive(a, opts);
  } else {
    if (!a.is_nonnegative()) {
      std::cerr << "warning: negative entries; the variance and tail bounds assume entries in "
                   "[0, 1]\n";
    }
    const SamplingConfig cfg{*run.gamma,
                             r.algorithm == "lean" ? SamplingMode::kLean : SamplingMode::kDimsum};
    run.result = run_sampled(a, run.stats, cfg, opts);
  }
  return run;
}

// Gram estimate in the units of the input matrix.
DenseSymmetric gram_estimate(const PipelineRun& run) {
  const double s2 = run.scaled.scale_factor * run.scaled.scale_factor;
  if (run.result.similarity.kind == SimilarityKind::kGram) {
    return run.result.similarity.values.scaled(s2);
  }
  return unnormalize(run.result.similarity, run.stats).scaled(s2);
}

int cmd_run(const RunArgs& r) {
  const auto run = execute(r, "run");
  const auto& b = run.result.similarity;
  // Naive output is a Gram matrix; report it in input units.
  SimilarityMatrix shown = b;
  if (b.kind == SimilarityKind::kGram) {
    const double s2 = run.scaled.scale_factor * run.scaled.scale_factor;
    shown.values = b.values.scaled(s2);
  }

  if (!r.out.empty()) {
    std::ofstream out(r.out);
    if (!out) throw ParameterError("cannot write " + r.out);
    if (r.out_format == "tsv") {
      write_dense_tsv(out, shown.values);
    } else {
      write_similarity_mm(out, shown);
    }
  }
  if (!r.gram_out.empty()) {
    std::ofstream out(r.gram_out);
    if (!out) throw ParameterError("cannot write " + r.gram_out);
    write_dense_tsv(out, gram_estimate(run));
  }

  SimilarityMeta meta;
  meta.kind = b.kind;
  meta.algorithm = r.algorithm;
  meta.gamma = run.gamma;
  meta.seed = r.seed;
  meta.diagonal_exact = b.diagonal_exact;
  meta.scale_factor = run.scaled.scale_factor;
  meta.n = b.size();
  const Json meta_json = meta;
  const Json stats_json = run.result.stats;
  if (!r.stats_out.empty()) write_json_file(r.stats_out, stats_json);
  if (!r.meta_out.empty()) write_json_file(r.meta_out, meta_json);

  if (!r.emission_log.empty()) {
    std::ofstream out(r.emission_log);
    if (!out) throw ParameterError("cannot write " + r.emission_log);
    out.precision(17);
    for (const auto& e : run.result.emission_log) {
      out << e.key.j << '\t' << e.key.k << '\t' << e.value << '\n';
    }
  }
  std::cout << Json{{"metadata", meta_json}, {"stats", stats_json}}.dump(2) << '\n';
  return 0;
}

// --------------------------------------------------------------------- svd

struct SvdArgs {
  RunArgs run;
  std::string estimate;
  bool with_oracle = false;
  std::string out;
  std::string v_out;
};

int cmd_svd(const SvdArgs& s) {
  DenseSymmetric gram;
  std::optional<DenseSymmetric> truth;
  Json cfg;
  if (!s.estimate.empty()) {
    cfg = Json{{"command", "svd"}, {"estimate", s.estimate}};
    echo_config(cfg);
    std::ifstream in(s.estimate);
    if (!in) throw ParameterError("cannot open " + s.estimate);
    gram = read_dense_tsv(in);
    if (s.with_oracle) {
      if (s.run.in.input.empty() && s.run.in.m == 0 && !s.run.in.lowerbound) {
        throw ParameterError("--with-oracle with --estimate needs the source matrix");
      }
      truth = exact_gram(obtain_matrix(s.run.in));
    }
  } else {
    const auto run = execute(s.run, "svd");
    cfg = run.config;
    gram = gram_estimate(run);
    if (s.with_oracle) {
      const double s2 = run.scaled.scale_factor * run.scaled.scale_factor;
      truth = exact_gram(run.scaled.matrix).scaled(s2);
    }
  }

  const auto sv = recover_singular_values(gram);
  Json out = singular_values_json(sv);
  if (truth) out["relative_spectral_error"] = relative_spectral_error(gram, *truth);
  out["config"] = cfg;
  if (!s.out.empty()) {
    write_json_file(s.out, out);
  } else {
    std::cout << out.dump(2) << '\n';
  }
  if (!s.v_out.empty()) {
    std::ofstream vf(s.v_out);
    if (!vf) throw ParameterError("cannot write " + s.v_out);
    vf.precision(17);
    const std::size_t n = sv.sigma.size();
    // Row r, column i holds component r of the i-th right singular vector.
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < n; ++i) vf << (i ? "\t" : "") << sv.v[i * n + r];
      vf << '\n';
    }
  }
  if (s.out.empty()) return 0;
  std::cout << "sigma_1=" << (sv.sigma.empty() ? 0.0 : sv.sigma.front());
  if (truth) std::cout << " relative_spectral_error=" << out["relative_spectral_error"];
  std::cout << '\n';
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string suite = "all";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, epsilon, c, alpha, delta;
  std::optional<std::size_t> trials, n, L, i, j;
  std::vector<std::size_t> m_values;
  std::string matrix;
  std::string format = "mm";
  std::optional<std::size_t> threads;
  bool raw_diagonal = false;
  std::string out_dir;
};

SuiteConfig verify_config(const VerifyArgs& v) {
  SuiteConfig cfg;
  if (!v.config.empty()) {
    std::ifstream in(v.config);
    if (!in) throw ParameterError("cannot open " + v.config);
    Json j;
    try {
      in >> j;
    } catch (const Json::parse_error& e) {
      throw ParameterError(v.config + ": " + e.what());
    }
    cfg = suite_config_from_json(j);
  }
  if (v.seed) cfg.seed = *v.seed;
  if (v.gamma) {
    cfg.gamma = v.gamma;
    cfg.epsilon.reset();
    cfg.c.reset();
  }
  if (v.epsilon) cfg.epsilon = v.epsilon;
  if (v.c) cfg.c = v.c;
  if (cfg.gamma && (v.epsilon || v.c)) {
    if (v.gamma) throw ParameterError("--gamma excludes --epsilon/--c");
    cfg.gamma.reset();
  }
  if (v.alpha) cfg.alpha = v.alpha;
  if (v.delta) cfg.delta = v.delta;
  if (v.trials) cfg.trials = v.trials;
  if (v.n) cfg.n = v.n;
  if (v.L) cfg.L = v.L;
  if (v.i) cfg.i = v.i;
  if (v.j) cfg.j = v.j;
  if (!v.m_values.empty()) cfg.m_values = v.m_values;
  if (!v.matrix.empty()) {
    MatrixSpec spec;
    spec.path = v.matrix;
    spec.format = parse_matrix_format(v.format);
    cfg.matrix = spec;
  }
  if (v.threads) cfg.threads = *v.threads;
  if (v.raw_diagonal) cfg.exact_diagonal = false;
  return cfg;
}

int cmd_verify(const VerifyArgs& v) {
  std::vector<std::string> suites;
  if (v.suite == "all") {
    suites = suite_names();
  } else {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), v.suite) == names.end()) {
      std::cerr << "error: unknown suite '" << v.suite << "'\n";
      return static_cast<int>(ExitCode::kUsage);
    }
    suites = {v.suite};
  }
  const auto cfg = verify_config(v);
  if (!v.out_dir.empty()) fs::create_directories(v.out_dir);

  bool all_pass = true;
  Json reports = Json::array();
  for (const auto& name : suites) {
    // These two build their own matrices.
    SuiteConfig own = cfg;
    if (name == "dimfree" || name == "lowerbound") own.matrix.reset();
    echo_config(suite_config_json(name, resolve_suite_config(name, own)));
    const auto report = run_suite(name, own);
    Json j = report;
    j["config"] = suite_config_json(name, resolve_suite_config(name, own));
    if (report.skipped) {
      std::cerr << name << ": skipped (" << report.notes << ")\n";
    } else {
      std::cerr << name << ": " << (report.pass ? "PASS" : "FAIL") << '\n';
      all_pass = all_pass && report.pass;
    }
    if (!v.out_dir.empty()) write_json_file((fs::path(v.out_dir) / (name + ".json")).string(), j);
    reports.push_back(std::move(j));
  }
  std::cout << (reports.size() == 1 ? reports[0] : reports).dump(2) << '\n';
  return all_pass ? 0 : static_cast<int>(ExitCode::kSuiteFailure);
}

// --------------------------------------------------------------- calibrate

struct CalibrateArgs {
  VerifyArgs base;
  std::vector<double> c_values = {1, 2, 4, 8, 16};
};

// Success-rate sweep over c on the success suite's instance.
int cmd_calibrate(const CalibrateArgs& args) {
  auto cfg = verify_config(args.base);
  cfg.c = args.c_values.front();
  const auto resolved = resolve_suite_config("success", cfg);
  Json echo = suite_config_json("success", resolved);
  echo["suite"] = "calibration";
  echo.erase("c");
  echo.erase("resolved_gamma");
  echo["c_values"] = args.c_values;
  echo_config(echo);

  const auto a = materialize(*resolved.matrix);
  SuiteOptions options;
  options.threads = resolved.threads;
  options.exact_diagonal = resolved.exact_diagonal;
  const std::uint64_t seed = derive_seed(derive_seed(resolved.seed, 1), 2);
  const auto report = check_calibration_trend(a, *resolved.epsilon, args.c_values,
                                              *resolved.trials, seed, options);
  Json j = report;
  j["config"] = echo;
  std::cout << j.dump(2) << '\n';
  std::cerr << "calibration: " << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? 0 : static_cast<int>(ExitCode::kSuiteFailure);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled all-pairs similarity on a simulated map/reduce engine"};
  app.require_subcommand(1);
  const std::size_t default_threads = default_thread_count();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random or lower-bound matrix");
  add_input_options(generate, gen.in, false);
  generate->add_option("--seed", gen.in.gen_seed, "Generator seed")->capture_default_str();
  generate->add_option("--out,-o", gen.out, "Output path")->required();
  generate->add_option("--out-format", gen.out_format, "mm or tsv")->capture_default_str();

  RunArgs run;
  run.threads = default_threads;
  auto add_run_options = [&](CLI::App* cmd, RunArgs& r) {
    add_input_options(cmd, r.in, true);
    cmd->add_option("--gen-seed", r.in.gen_seed, "Generator seed")->capture_default_str();
    cmd->add_option("--algorithm,-a", r.algorithm, "naive, dimsum or lean")
        ->capture_default_str()
        ->check(CLI::IsMember({"naive", "dimsum", "lean"}));
    cmd->add_option("--gamma", r.gamma, "Oversampling parameter");
    cmd->add_option("--epsilon", r.epsilon, "Target relative error; gamma = c n / epsilon^2");
    cmd->add_option("--c", r.c, "Calibration constant for --epsilon (default 4)");
    cmd->add_option("--seed", r.seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--threads", r.threads, "Worker threads (default $DIMSUM_THREADS or cores)");
    cmd->add_flag("--raw-diagonal", r.raw_diagonal, "Keep the sampled cosine diagonal");
  };
  auto* run_cmd = app.add_subcommand("run", "Run a similarity pipeline");
  add_run_options(run_cmd, run);
  run_cmd->add_option("--out,-o", run.out, "Similarity matrix output");
  run_cmd->add_option("--out-format", run.out_format, "mm or tsv (dense)")
      ->capture_default_str()
      ->check(CLI::IsMember({"mm", "tsv"}));
  run_cmd->add_option("--gram-out", run.gram_out, "Dense TSV of the Gram estimate D B D");
  run_cmd->add_option("--stats-out", run.stats_out, "RunStats JSON");
  run_cmd->add_option("--meta-out", run.meta_out, "Metadata JSON");
  run_cmd->add_option("--emission-log", run.emission_log, "TSV of every emission");

  SvdArgs svd;
  svd.run.threads = default_threads;
  svd.run.algorithm = "naive";
  auto* svd_cmd = app.add_subcommand("svd", "Recover singular values and right vectors");
  add_run_options(svd_cmd, svd.run);
  svd_cmd->add_option("--estimate", svd.estimate, "Dense TSV Gram estimate instead of a run");
  svd_cmd->add_flag("--with-oracle", svd.with_oracle, "Report error against the exact Gram");
  svd_cmd->add_option("--out,-o", svd.out, "JSON output (default stdout)");
  svd_cmd->add_option("--v-out", svd.v_out, "Right singular vectors as dense TSV");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite,-s", ver.suite, "Suite name or all")->capture_default_str();
  verify->add_option("--config", ver.config, "JSON suite configuration");
  verify->add_option("--seed", ver.seed, "Master seed");
  verify->add_option("--gamma", ver.gamma, "Oversampling parameter");
  verify->add_option("--epsilon", ver.epsilon, "Target relative error");
  verify->add_option("--c", ver.c, "Calibration constant (success)");
  verify->add_option("--alpha", ver.alpha, "Chernoff alpha; gamma = alpha / epsilon");
  verify->add_option("--delta", ver.delta, "Chernoff tail offset");
  verify->add_option("--trials", ver.trials, "Trials per suite");
  verify->add_option("--n", ver.n, "Columns (dimfree, lowerbound)");
  verify->add_option("--L", ver.L, "Nonzeros per row or group size");
  verify->add_option("--i", ver.i, "First column of the chernoff pair");
  verify->add_option("--j", ver.j, "Second column of the chernoff pair");
  verify->add_option("--m-values", ver.m_values, "Row counts for dimfree, comma-separated")->delimiter(',');
  verify->add_option("--matrix", ver.matrix, "Matrix file for matrix-based suites");
  verify->add_option("--format", ver.format, "Format of --matrix")->capture_default_str();
  verify->add_option("--threads", ver.threads, "Concurrent trials");
  verify->add_flag("--raw-diagonal", ver.raw_diagonal, "Evaluate the sampled diagonal too");
  verify->add_option("--out-dir", ver.out_dir, "Write one report JSON per suite here");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Sweep c on the success instance");
  calibrate->add_option("--c-values", cal.c_values, "Ascending c values")->delimiter(',');
  calibrate->add_option("--epsilon", cal.base.epsilon, "Target relative error (default 0.5)");
  calibrate->add_option("--trials", cal.base.trials, "Trials per c (default 100)");
  calibrate->add_option("--seed", cal.base.seed, "Master seed");
  calibrate->add_option("--matrix", cal.base.matrix, "Matrix file instead of the default");
  calibrate->add_option("--format", cal.base.format, "Format of --matrix")->capture_default_str();
  calibrate->add_option("--threads", cal.base.threads, "Concurrent trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*svd_cmd) return cmd_svd(svd);
    if (*verify) return cmd_verify(ver);
    if (*calibrate) return cmd_calibrate(cal);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kParameter);
  }
  return static_cast<int>(ExitCode::kUsage);
}
