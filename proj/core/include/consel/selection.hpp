#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace consel {

using ScoreMap = std::map<std::string, std::optional<double>>;
using VectorMap = std::map<std::string, std::vector<double>>;

/// max(1, ceil(ratio_p * n)); throws unless 0 < ratio_p <= 1.
std::size_t selection_size(std::size_t n, double ratio_p);

/// The smallest defined scores first; undefined scores last; ties by id.
std::vector<std::string> select_offline(const ScoreMap& scores, double ratio_p);

/// The largest defined scores first; undefined scores last; ties by id.
std::vector<std::string> select_online(const ScoreMap& scores, double ratio_p);

/// Uniform sample without replacement, deterministic in `seed`.
std::vector<std::string> select_random(const std::vector<std::string>& ids, double ratio_p,
                                       std::uint64_t seed);

/// Highest mean uncertainty first (the classic uncertainty-sampling baseline).
std::vector<std::string> select_top_uncertainty(const std::map<std::string, double>& scores,
                                                double ratio_p);

/// Greedy farthest-first traversal in Euclidean distance starting from the
/// smallest id. Returns centers in the order they were picked.
std::vector<std::string> select_kcenter(const VectorMap& vectors, double ratio_p);

}  // namespace consel
