// Runs the dimsum executable as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "dimsum/json_io.hpp"
#include "dimsum/matrix.hpp"
#include "dimsum/pipelines.hpp"
#include "dimsum/spectral.hpp"

namespace fs = std::filesystem;
using namespace dimsum;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Created on load, removed at exit; `cleanup` is constructed after `scratch`
// and so destroyed before it.
const fs::path scratch = [] {
  auto d = fs::temp_directory_path() / ("dimsum_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}();

struct ScratchCleanup {
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(scratch, ec);
  }
} cleanup;

std::string path(const std::string& name) { return (scratch / name).string(); }

// stdout only; stderr goes to a file so the effective config can be inspected.
Result dimsum_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DIMSUM_CLI + " " + args + " 2>" + path("stderr.txt");
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

const char* kIdentity3 =
    "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n";

}  // namespace

TEST_CASE("generate") {
  const auto r = dimsum_cli("generate --lowerbound --n 6 --L 3 --out " + path("lb.mtx"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("nnz=18") != std::string::npos);
  const auto a = load_matrix(path("lb.mtx"), MatrixFormat::kMatrixMarket);
  CHECK(a.n_rows() == 6);
  CHECK(a.n_cols() == 6);

  REQUIRE(dimsum_cli("generate --m 100 --n 10 --L 5 --binary --seed 7 --out " + path("g1.mtx")).status == 0);
  REQUIRE(dimsum_cli("generate --m 100 --n 10 --L 5 --binary --seed 7 --out " + path("g2.mtx")).status == 0);
  CHECK(slurp(path("g1.mtx")) == slurp(path("g2.mtx")));
  const auto g = load_matrix(path("g1.mtx"), MatrixFormat::kMatrixMarket);
  CHECK(g.nnz() == 500);
  CHECK(g.max_row_nnz() == 5);

  CHECK(dimsum_cli("generate --m 3 --n 2 --L 5 --out " + path("bad.mtx")).status == 2);
  CHECK(dimsum_cli("generate --bogus").status == 1);
}

TEST_CASE("run") {
  write_text(path("eye.mtx"), kIdentity3);
  SUBCASE("naive on the identity is diagonal only") {
    const auto r = dimsum_cli("run --input " + path("eye.mtx") + " --algorithm naive --out " +
                              path("eye_b.mtx"));
    REQUIRE(r.status == 0);
    const auto b = load_matrix(path("eye_b.mtx"), MatrixFormat::kMatrixMarket);
    CHECK(b.nnz() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(b.row(i)[0] == Entry{static_cast<Index>(i), 1.0});
    CHECK(slurp(path("eye_b.mtx")).find("% kind gram") != std::string::npos);
  }
  SUBCASE("epsilon and c resolve to gamma and are echoed") {
    const auto r = dimsum_cli("run --m 500 --n 40 --L 4 --algorithm dimsum --epsilon 0.5 --c 4 "
                              "--meta-out " + path("meta.json"));
    REQUIRE(r.status == 0);
    const auto meta = Json::parse(slurp(path("meta.json")));
    CHECK(meta.at("gamma").get<double>() == 640.0);
    CHECK(meta.at("kind") == "cosine");
    CHECK(meta.at("diagonal_exact") == true);
    CHECK(slurp(path("stderr.txt")).find("\"gamma\":640.0") != std::string::npos);
  }
  SUBCASE("shuffle size equals the emission log length") {
    const auto r = dimsum_cli("run --m 2000 --n 20 --L 5 --algorithm dimsum --gamma 10 --seed 3 "
                              "--stats-out " + path("stats.json") + " --emission-log " +
                              path("log.tsv"));
    REQUIRE(r.status == 0);
    const auto stats = Json::parse(slurp(path("stats.json")));
    std::ifstream log(path("log.tsv"));
    std::size_t lines = 0;
    for (std::string line; std::getline(log, line);) ++lines;
    CHECK(lines == stats.at("shuffle_size").get<std::size_t>());
    CHECK(lines > 0);
  }
  SUBCASE("gram output is in input units") {
    write_text(path("two.mtx"),
               "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 4\n2 1 2\n2 2 2\n");
    REQUIRE(dimsum_cli("run --input " + path("two.mtx") + " --algorithm lean --gamma 100 "
                       "--gram-out " + path("two_g.tsv")).status == 0);
    std::ifstream in(path("two_g.tsv"));
    const auto g = read_dense_tsv(in);
    CHECK(g(0, 0) == doctest::Approx(20.0));
    CHECK(g(0, 1) == doctest::Approx(4.0));
    CHECK(g(1, 1) == doctest::Approx(4.0));
  }
  SUBCASE("parameter errors") {
    CHECK(dimsum_cli("run --m 50 --n 5 --L 2 --algorithm dimsum --gamma 2 --epsilon 0.5").status == 2);
    CHECK(dimsum_cli("run --m 50 --n 5 --L 2 --algorithm dimsum").status == 2);
    CHECK(dimsum_cli("run --m 50 --n 5 --L 2 --algorithm naive --gamma 1").status == 2);
    CHECK(dimsum_cli("run --m 50 --n 5 --L 2 --algorithm nope").status == 1);
    write_text(path("broken.mtx"), "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n");
    CHECK(dimsum_cli("run --input " + path("broken.mtx") + " --algorithm naive").status == 2);
    CHECK(slurp(path("stderr.txt")).find("line 3") != std::string::npos);
  }
  SUBCASE("DIMSUM_THREADS sets the default thread count") {
    REQUIRE(dimsum_cli("run --m 50 --n 5 --L 2 --algorithm naive", "DIMSUM_THREADS=3").status == 0);
    CHECK(slurp(path("stderr.txt")).find("\"threads\":3") != std::string::npos);
  }
}

TEST_CASE("svd") {
  write_text(path("eye.mtx"), kIdentity3);
  SUBCASE("identity") {
    const auto r = dimsum_cli("svd --input " + path("eye.mtx"));
    REQUIRE(r.status == 0);
    const auto j = Json::parse(r.out);
    CHECK(j.at("sigma") == Json::array({1.0, 1.0, 1.0}));
  }
  SUBCASE("diag(3,2,1), naive path, with oracle") {
    write_text(path("d.mtx"),
               "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 3\n2 2 2\n3 3 1\n");
    const auto r = dimsum_cli("svd --input " + path("d.mtx") + " --with-oracle --v-out " + path("v.tsv"));
    REQUIRE(r.status == 0);
    const auto j = Json::parse(r.out);
    const auto sigma = j.at("sigma").get<std::vector<double>>();
    CHECK(sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sigma[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j.at("relative_spectral_error").get<double>() <= 1e-12);
    CHECK(fs::file_size(path("v.tsv")) > 0);
  }
  SUBCASE("precomputed estimate") {
    write_text(path("est.tsv"), "4\t0\n0\t9\n");
    const auto j = Json::parse(dimsum_cli("svd --estimate " + path("est.tsv")).out);
    CHECK(j.at("sigma") == Json::array({3.0, 2.0}));
  }
  SUBCASE("random 500 x 20, dimsum eps = 0.3: error <= 0.3 in at least half of 20 runs") {
    REQUIRE(dimsum_cli("generate --m 500 --n 20 --L 5 --uniform --seed 4 --out " + path("r.mtx")).status == 0);
    int good = 0;
    for (int seed = 0; seed < 20; ++seed) {
      const auto r = dimsum_cli("svd --input " + path("r.mtx") + " --algorithm dimsum --epsilon 0.3 "
                                "--with-oracle --seed " + std::to_string(seed));
      REQUIRE(r.status == 0);
      if (Json::parse(r.out).at("relative_spectral_error").get<double>() <= 0.3) ++good;
    }
    CHECK(good >= 10);
  }
}

TEST_CASE("verify") {
  SUBCASE("lowerbound") {
    const auto r = dimsum_cli("verify --suite lowerbound --n 6 --L 3");
    REQUIRE(r.status == 0);
    const auto j = Json::parse(r.out);
    CHECK(j.at("pass") == true);
    CHECK(j.at("checks")[0].at("measured").get<double>() == 6.0);
  }
  SUBCASE("all, twice, identical reports") {
    REQUIRE(dimsum_cli("verify --suite all --seed 1 --out-dir " + path("v1")).status == 0);
    REQUIRE(dimsum_cli("verify --suite all --seed 1 --out-dir " + path("v2")).status == 0);
    for (const char* s : {"moments", "success", "chernoff", "shuffle", "dimfree", "reducekey", "lowerbound"}) {
      const std::string name = std::string(s) + ".json";
      CHECK(slurp(path("v1/" + name)) == slurp(path("v2/" + name)));
      CHECK(!slurp(path("v1/" + name)).empty());
    }
  }
  SUBCASE("shuffle with gamma = 0 is skipped") {
    const auto r = dimsum_cli("verify --suite shuffle --gamma 0");
    CHECK(r.status == 0);
    CHECK(Json::parse(r.out).at("skipped") == true);
    CHECK(slurp(path("stderr.txt")).find("skipped") != std::string::npos);
  }
  SUBCASE("config file") {
    write_text(path("cfg.json"), R"({"seed": 3, "gamma": 40, "trials": 10,
      "matrix": {"m": 1000, "n": 20, "L": 4}})");
    const auto r = dimsum_cli("verify --suite reducekey --config " + path("cfg.json"));
    REQUIRE(r.status == 0);
    const auto j = Json::parse(r.out);
    CHECK(j.at("config").at("matrix").at("m") == 1000);
    CHECK(j.at("bound_value").get<double>() == 40.0);
  }
  SUBCASE("failures and usage errors") {
    CHECK(dimsum_cli("verify --suite nope").status == 1);
    CHECK(dimsum_cli("verify --suite success --epsilon 0.5 --c 4 --trials 20 --seed 2").status == 0);
    // Negative entries are outside the moments regime.
    write_text(path("neg.mtx"), "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 -1\n2 2 1\n");
    CHECK(dimsum_cli("verify --suite moments --matrix " + path("neg.mtx")).status == 2);
    // No pair has cosine >= 2.
    CHECK(dimsum_cli("verify --suite chernoff --epsilon 2").status == 2);
  }
}

TEST_CASE("calibrate") {
  const auto r = dimsum_cli("calibrate --epsilon 0.1 --c-values 0.0025,0.01,0.04 --trials 30");
  REQUIRE(r.status == 0);
  const auto j = Json::parse(r.out);
  CHECK(j.at("details").at("success_rate_c=0.04").get<double>() == 1.0);
  CHECK(dimsum_cli("calibrate --c-values 4,2").status == 2);
}
