#include "consel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consel/rng.hpp"
#include "consel/types.hpp"

namespace consel {

std::size_t selection_size(std::size_t n, double ratio_p) {
  if (!(ratio_p > 0.0 && ratio_p <= 1.0)) throw Error("ratio_p must lie in (0, 1]");
  // The epsilon keeps products like 0.3 * 10 = 3.0000000000000004 from rounding up.
  const double raw = std::ceil(ratio_p * static_cast<double>(n) - 1e-9);
  const auto count = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(count, n);
}

namespace {

struct Ranked {
  const std::string* id;
  std::optional<double> score;
};

std::vector<std::string> select_ranked(const ScoreMap& scores, double ratio_p, bool smallest_first) {
  if (scores.empty()) throw Error("empty score set");
  const std::size_t n = selection_size(scores.size(), ratio_p);
  std::vector<Ranked> rows;
  rows.reserve(scores.size());
  for (const auto& [id, s] : scores) {
    if (s && std::isnan(*s)) throw Error("NaN score for " + id);
    rows.push_back({&id, s});
  }
  auto before = [smallest_first](const Ranked& a, const Ranked& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return smallest_first ? *a.score < *b.score : *a.score > *b.score;
    return *a.id < *b.id;
  };
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n), rows.end(), before);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*rows[i].id);
  return out;
}

}  // namespace

std::vector<std::string> select_offline(const ScoreMap& scores, double ratio_p) {
  return select_ranked(scores, ratio_p, true);
}

std::vector<std::string> select_online(const ScoreMap& scores, double ratio_p) {
  return select_ranked(scores, ratio_p, false);
}

std::vector<std::string> select_random(const std::vector<std::string>& ids, double ratio_p,
                                       std::uint64_t seed) {
  if (ids.empty()) throw Error("empty id list");
  Rng rng(seed);
  std::vector<std::string> out;
  for (auto i : rng.sample_without_replacement(ids.size(), selection_size(ids.size(), ratio_p)))
    out.push_back(ids[i]);
  return out;
}

std::vector<std::string> select_top_uncertainty(const std::map<std::string, double>& scores,
                                                double ratio_p) {
  ScoreMap wrapped;
  for (const auto& [id, s] : scores) wrapped.emplace(id, s);
  return select_ranked(wrapped, ratio_p, false);
}

std::vector<std::string> select_kcenter(const VectorMap& vectors, double ratio_p) {
  if (vectors.empty()) throw Error("empty vector set");
  const std::size_t dim = vectors.begin()->second.size();
  std::vector<const std::string*> ids;
  std::vector<const std::vector<double>*> points;
  for (const auto& [id, v] : vectors) {
    if (v.size() != dim) throw Error("dimension mismatch for " + id);
    ids.push_back(&id);
    points.push_back(&v);
  }
  const std::size_t n = selection_size(ids.size(), ratio_p);

  auto dist2 = [&](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double t = (*points[a])[k] - (*points[b])[k];
      d += t * t;
    }
    return d;
  };

  // nearest[i]: squared distance from point i to its closest chosen center.
  std::vector<double> nearest(ids.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(ids.size(), false);
  std::vector<std::string> out;
  std::size_t next = 0;  // std::map order puts the smallest id first
  for (std::size_t round = 0; round < n; ++round) {
    chosen[next] = true;
    out.push_back(*ids[next]);
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (chosen[i]) continue;
      nearest[i] = std::min(nearest[i], dist2(i, next));
      if (nearest[i] > best) {  // strict: earlier (smaller) id wins ties
        best = nearest[i];
        best_i = i;
      }
    }
    next = best_i;
  }
  return out;
}

}  // namespace consel
