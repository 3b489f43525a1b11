#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "consel/types.hpp"

namespace consel {

/// Offline uncertainty consistency: the point-biserial correlation between
/// uncertainty and 0/1 reward,
///
///   (mean U | R=1  -  mean U | R=0) / s_K * sqrt(K0 K1 / K^2),
///
/// with s_K the population standard deviation of U. Returns 0 when every
/// reward is equal and nullopt when U is constant over a mixed group.
/// Negative values mean correct answers were the confident ones.
std::optional<double> r_pb_offline(std::span<const double> uncertainties, std::span<const int> rewards);

/// Online consistency: (1/K)(sum_{A>0} A/U + gamma * sum_{A<0} A/U).
/// Zero advantages fall in neither sum.
double r_pb_online(std::span<const double> advantages, std::span<const double> uncertainties,
                   double gamma);

/// Replaces a response's traces with ones recomputed under the current model.
using RescoreFn = std::function<ResponseRecord(const ResponseRecord&)>;

/// Fills every GroupScore field for one group. Traces come from the recorded
/// response unless `rescore` is given.
GroupScore score_group(const ResponseGroup& group, const SelectionConfig& config,
                       AdvantageEstimator estimator = AdvantageEstimator::grpo,
                       const RescoreFn& rescore = {});

/// Score used for online ranking: nullopt for groups whose advantages all
/// vanish, so they rank behind every group that carries a gradient.
std::optional<double> online_rank_score(const GroupScore& score);

}  // namespace consel
