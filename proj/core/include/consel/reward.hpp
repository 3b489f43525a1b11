#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "consel/types.hpp"

namespace consel {

/// Trims surrounding whitespace; integer literals lose their leading zeros.
std::string normalize_answer(std::string_view s);

/// Rule-based 0/1 reward: 1 iff both sides normalize to the same string.
int verify_answer(std::string_view predicted, std::string_view reference);

/// (R - mean) / std with population std; all zeros for a constant group.
std::vector<double> grpo_advantages(std::span<const double> rewards);

/// R_k minus the mean of the other K-1 rewards.
std::vector<double> rloo_advantages(std::span<const double> rewards);

std::vector<double> advantages(std::span<const double> rewards, AdvantageEstimator estimator);
std::vector<double> advantages(const std::vector<int>& rewards, AdvantageEstimator estimator);

}  // namespace consel
