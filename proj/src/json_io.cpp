#include "dimsum/json_io.hpp"

namespace dimsum {

void to_json(Json& j, const RunStats& s) {
  j = Json{{"shuffle_size", s.shuffle_size},
           {"reduce_key_max", s.reduce_key_max},
           {"reduce_key_mean", s.reduce_key_mean},
           {"distinct_keys", s.distinct_keys},
           {"map_tasks", s.map_tasks},
           {"canonical_keys", s.canonical_keys},
           {"wall_seconds", s.wall_seconds}};
}

void from_json(const Json& j, RunStats& s) {
  j.at("shuffle_size").get_to(s.shuffle_size);
  j.at("reduce_key_max").get_to(s.reduce_key_max);
  j.at("reduce_key_mean").get_to(s.reduce_key_mean);
  j.at("distinct_keys").get_to(s.distinct_keys);
  j.at("map_tasks").get_to(s.map_tasks);
  s.canonical_keys = j.value("canonical_keys", true);
  s.wall_seconds = j.value("wall_seconds", 0.0);
}

void to_json(Json& j, const Check& c) {
  j = Json{{"name", c.name},
           {"measured", c.measured},
           {"op", c.op},
           {"threshold", c.threshold},
           {"pass", c.pass}};
}

void to_json(Json& j, const TailCheck& t) {
  j = Json{{"delta", t.delta},
           {"alpha", t.alpha},
           {"empirical_upper_tail", t.empirical_upper_tail},
           {"empirical_lower_tail", t.empirical_lower_tail},
           {"chernoff_upper", t.chernoff_upper},
           {"chernoff_lower", t.chernoff_lower}};
}

void to_json(Json& j, const TrialReport& r) {
  j = Json{{"suite", r.suite},
           {"pass", r.pass},
           {"skipped", r.skipped},
           {"trials", r.trials},
           {"successes", r.successes},
           {"statistic_mean", r.statistic_mean},
           {"statistic_var", r.statistic_var},
           {"bound_value", r.bound_value},
           {"checks", r.checks},
           {"details", r.details},
           {"notes", r.notes},
           {"seed", r.seed},
           {"seeds", r.seeds}};
  if (r.tail) j["tail"] = *r.tail;
}

Json eigen_json(const EigenResult& e) {
  Json vectors = Json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto v = e.vector(i);
    vectors.push_back(std::vector<double>(v.begin(), v.end()));
  }
  return Json{{"eigenvalues", e.eigenvalues}, {"eigenvectors", vectors}, {"sweeps", e.sweeps}};
}

Json singular_values_json(const SingularValues& s) {
  const std::size_t n = s.sigma.size();
  Json vectors = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    vectors.push_back(std::vector<double>(s.v.begin() + static_cast<std::ptrdiff_t>(i * n),
                                          s.v.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
  }
  return Json{{"sigma", s.sigma}, {"v", vectors}, {"clamped_negative", s.clamped_negative}};
}

void to_json(Json& j, const SimilarityMeta& m) {
  j = Json{{"kind", m.kind == SimilarityKind::kCosine ? "cosine" : "gram"},
           {"algorithm", m.algorithm},
           {"gamma", m.gamma ? Json(*m.gamma) : Json(nullptr)},
           {"seed", m.seed},
           {"diagonal_exact", m.diagonal_exact},
           {"scale_factor", m.scale_factor},
           {"n", m.n},
           {"canonical_keys", true}};
}

}  // namespace dimsum
