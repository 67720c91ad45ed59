#pragma once

#include "json.hpp"

#include "dimsum/mr_stats.hpp"
#include "dimsum/pipelines.hpp"
#include "dimsum/spectral.hpp"
#include "dimsum/verify.hpp"

namespace dimsum {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const RunStats& s);
void from_json(const Json& j, RunStats& s);

void to_json(Json& j, const Check& c);
void to_json(Json& j, const TailCheck& t);
void to_json(Json& j, const TrialReport& r);

// {"eigenvalues": [...], "eigenvectors": [[column 0], [column 1], ...]}
Json eigen_json(const EigenResult& e);
Json singular_values_json(const SingularValues& s);

// Metadata written next to a similarity matrix.
struct SimilarityMeta {
  SimilarityKind kind = SimilarityKind::kGram;
  std::string algorithm;
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  bool diagonal_exact = false;
  double scale_factor = 1.0;
  std::size_t n = 0;
};
void to_json(Json& j, const SimilarityMeta& m);

}  // namespace dimsum
