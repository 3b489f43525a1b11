#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consel/policy.hpp"
#include "consel/selection.hpp"
#include "consel/types.hpp"

namespace consel {

/// One query's generations plus the advantages that weight them.
struct BatchItem {
  const QueryRecord* query = nullptr;
  const ResponseGroup* group = nullptr;
  std::vector<double> advantages;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Policy-gradient loss averaged over the batch,
///
///   -(1/K) sum_k (1/|y_k|) sum_t A_k log pi(y_kt | ...),
///
/// plus `kl_coeff` times the mean per-token k3 penalty against `reference`.
/// The gradient is exact.
LossAndGrad rlvr_loss_and_grad(const ToyPolicy& policy, std::span<const BatchItem> batch,
                               double kl_coeff = 0.0, const ToyPolicy* reference = nullptr);

struct StepMetrics {
  int step = 0;
  double mean_reward = 0.0;
  double test_accuracy = 0.0;
  double policy_entropy = 0.0;
  double mean_response_length = 0.0;
  double mean_grad_norm = 0.0;
  double grad_norm_consistent = 0.0;
  double grad_norm_inconsistent = 0.0;
  std::vector<std::string> selected_ids;

  bool operator==(const StepMetrics&) const = default;
};

struct TrainResult {
  std::vector<StepMetrics> metrics;
  ToyPolicy policy;
};

/// Online training: each step draws B queries, generates G responses per
/// query, scores the groups, keeps the configured top fraction, and takes one
/// gradient step on the kept groups. `embeddings` feed the k-center selector;
/// without them each query is embedded by its operands.
TrainResult train_loop(const TrainConfig& config, const ToyTaskSpec& task,
                       const std::vector<QueryRecord>& dataset, const std::vector<QueryRecord>& testset,
                       const VectorMap* embeddings = nullptr);

/// Same, starting from an explicit policy (used for resumption and tests).
TrainResult train_loop(const TrainConfig& config, ToyPolicy initial, const std::vector<QueryRecord>& dataset,
                       const std::vector<QueryRecord>& testset, const VectorMap* embeddings = nullptr);

}  // namespace consel
