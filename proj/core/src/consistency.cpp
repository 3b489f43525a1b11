#include "consel/consistency.hpp"

#include <algorithm>
#include <cmath>

#include "consel/reward.hpp"
#include "consel/uncertainty.hpp"

namespace consel {

std::optional<double> r_pb_offline(std::span<const double> uncertainties, std::span<const int> rewards) {
  if (uncertainties.size() != rewards.size()) throw Error("length mismatch: uncertainties vs rewards");
  const std::size_t k = uncertainties.size();
  if (k < 2) throw Error("group too small");

  double sum1 = 0.0, sum0 = 0.0, sum = 0.0;
  int k1 = 0, k0 = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += uncertainties[i];
    if (rewards[i] != 0) {
      sum1 += uncertainties[i];
      ++k1;
    } else {
      sum0 += uncertainties[i];
      ++k0;
    }
  }
  if (k0 == 0 || k1 == 0) return 0.0;

  const double kd = static_cast<double>(k);
  const double mean = sum / kd;
  double var = 0.0;
  for (double u : uncertainties) var += (u - mean) * (u - mean);
  const double s_k = std::sqrt(var / kd);
  if (s_k == 0.0) return std::nullopt;

  const double diff = sum1 / k1 - sum0 / k0;
  const double r = diff / s_k * std::sqrt(static_cast<double>(k0) * static_cast<double>(k1) / (kd * kd));
  return std::clamp(r, -1.0, 1.0);
}

double r_pb_online(std::span<const double> advantages, std::span<const double> uncertainties,
                   double gamma) {
  if (advantages.size() != uncertainties.size()) throw Error("length mismatch: advantages vs uncertainties");
  if (advantages.size() < 2) throw Error("group too small");
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  double pos = 0.0, neg = 0.0;
  for (std::size_t j = 0; j < advantages.size(); ++j) {
    if (!(uncertainties[j] > 0.0)) throw Error("invalid uncertainty");
    if (advantages[j] > 0.0)
      pos += advantages[j] / uncertainties[j];
    else if (advantages[j] < 0.0)
      neg += advantages[j] / uncertainties[j];
  }
  return (pos + gamma * neg) / static_cast<double>(advantages.size());
}

GroupScore score_group(const ResponseGroup& group, const SelectionConfig& config,
                       AdvantageEstimator estimator, const RescoreFn& rescore) {
  validate(group);
  GroupScore s;
  s.query_id = group.query_id;
  const auto rewards = group.rewards();
  s.uncertainties.reserve(group.k());
  for (const auto& r : group.responses) {
    const double u = rescore ? uncertainty(rescore(r), config.uncertainty_kind, config.entropy_direction)
                             : uncertainty(r, config.uncertainty_kind, config.entropy_direction);
    s.uncertainties.push_back(u);
  }
  s.advantages = advantages(rewards, estimator);
  s.k1 = static_cast<int>(std::count(rewards.begin(), rewards.end(), 1));
  s.k0 = static_cast<int>(rewards.size()) - s.k1;
  s.r_pb = r_pb_offline(s.uncertainties, rewards);
  s.r_pb_online = r_pb_online(s.advantages, s.uncertainties, config.gamma);
  return s;
}

std::optional<double> online_rank_score(const GroupScore& score) {
  if (score.degenerate() || !score.r_pb_online) return std::nullopt;
  return score.r_pb_online;
}

}  // namespace consel
