#include "consel/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace consel {

std::string normalize_answer(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);

  std::string_view sign;
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    sign = digits.substr(0, 1);
    digits.remove_prefix(1);
  }
  const bool integer = !digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
  if (!integer) return std::string(s);

  const auto first = digits.find_first_not_of('0');
  digits = first == std::string_view::npos ? std::string_view("0") : digits.substr(first);
  if (digits == "0" || sign == "+") return std::string(digits);
  return std::string(sign) + std::string(digits);
}

int verify_answer(std::string_view predicted, std::string_view reference) {
  return normalize_answer(predicted) == normalize_answer(reference) ? 1 : 0;
}

std::vector<double> grpo_advantages(std::span<const double> rewards) {
  const std::size_t k = rewards.size();
  if (k < 2) throw Error("group too small");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(k);
  const double sd = std::sqrt(var);

  std::vector<double> out(k, 0.0);
  if (sd > 0.0)
    for (std::size_t i = 0; i < k; ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

std::vector<double> rloo_advantages(std::span<const double> rewards) {
  const std::size_t k = rewards.size();
  if (k < 2) throw Error("group too small");
  double total = 0.0;
  for (double r : rewards) total += r;
  // R_k - (S - R_k)/(K-1) = (K R_k - S)/(K-1)
  std::vector<double> out(k);
  const double kd = static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (kd * rewards[i] - total) / (kd - 1.0);
  return out;
}

std::vector<double> advantages(std::span<const double> rewards, AdvantageEstimator estimator) {
  return estimator == AdvantageEstimator::grpo ? grpo_advantages(rewards) : rloo_advantages(rewards);
}

std::vector<double> advantages(const std::vector<int>& rewards, AdvantageEstimator estimator) {
  std::vector<double> r(rewards.begin(), rewards.end());
  return advantages(std::span<const double>(r), estimator);
}

}  // namespace consel
