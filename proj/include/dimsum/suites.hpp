#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimsum/json_io.hpp"
#include "dimsum/matrix.hpp"
#include "dimsum/verify.hpp"

namespace dimsum {

// Where a suite's input matrix comes from.
struct MatrixSpec {
  std::optional<std::string> path;  // loaded, then scaled into [-1, 1]
  MatrixFormat format = MatrixFormat::kMatrixMarket;
  bool lowerbound = false;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t L = 0;
  ValueDist dist = ValueDist::kBinary;
  std::optional<std::uint64_t> seed;  // generator seed; derived from the suite seed if absent
};

// Suite parameters as read from JSON or flags. Unset fields take the
// per-suite defaults listed in the README.
struct SuiteConfig {
  std::uint64_t seed = 0;
  std::optional<MatrixSpec> matrix;
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> c;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> n;
  std::optional<std::size_t> L;
  std::optional<std::size_t> i;
  std::optional<std::size_t> j;
  std::vector<std::size_t> m_values;
  std::size_t threads = 1;
  bool exact_diagonal = true;
};

const std::vector<std::string>& suite_names();

SuiteConfig suite_config_from_json(const Json& j);

// Fills every field the suite uses with its default.
SuiteConfig resolve_suite_config(const std::string& suite, SuiteConfig cfg);
Json suite_config_json(const std::string& suite, const SuiteConfig& resolved);

SparseRowMatrix materialize(const MatrixSpec& spec);

// Runs one named suite (not "all") with defaults resolved.
TrialReport run_suite(const std::string& suite, const SuiteConfig& cfg);

}  // namespace dimsum
