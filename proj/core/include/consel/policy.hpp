#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "consel/toy_task.hpp"
#include "consel/types.hpp"

namespace consel {

/// Position-aware softmax policy over the toy vocabulary.
///
/// The logits at generated position t are the sum of three rows of the
/// weight table, one per active context feature:
///   - the (prompt, t) row,
///   - the (previous token, t) row, with '=' as the token before position 0,
///   - a per-position bias row.
/// Every row has `vocab::kSize` entries. Gradients of log-probabilities are
/// exact and sparse in those rows.
class ToyPolicy {
 public:
  ToyPolicy(ToyTaskSpec spec, PolicyParams params);

  /// Entries uniform on [-init_scale, init_scale]; zero scale gives the
  /// uniform policy.
  static ToyPolicy initial(const ToyTaskSpec& spec, double init_scale, std::uint64_t seed);
  static PolicyShape shape_for(const ToyTaskSpec& spec);

  const ToyTaskSpec& task() const { return spec_; }
  const PolicyParams& params() const { return params_; }
  std::span<double> theta() { return params_.theta; }
  std::span<const double> theta() const { return params_.theta; }
  std::size_t size() const { return params_.theta.size(); }

  /// Row of the (prompt, position 0) feature for `prompt`.
  int prompt_index(std::string_view prompt) const;

  using Rows = std::array<std::size_t, 3>;
  Rows rows(int prompt, int position, TokenId prev) const;

  /// Temperature-1 log-probabilities at one step.
  std::vector<double> log_probs(int prompt, int position, TokenId prev) const;

  /// Fresh per-token traces for `tokens` under this policy (reward untouched).
  ResponseRecord rescore(const QueryRecord& query, const ResponseRecord& response) const;

  /// grad += sum_t coeff[t] * d log pi(tokens[t] | context_t) / d theta.
  void add_logprob_grad(int prompt, std::span<const TokenId> tokens, std::span<const double> coeff,
                        std::span<double> grad) const;

  /// Greedy (argmax, smallest id on ties) decoding.
  std::vector<TokenId> greedy(const QueryRecord& query) const;

 private:
  ToyTaskSpec spec_;
  PolicyParams params_;
};

/// K autoregressive samples at `temperature`. Logprobs, entropies and margins
/// are recorded at temperature 1. Rewards come from verify_answer.
ResponseGroup sample_responses(const ToyPolicy& policy, const QueryRecord& query, int k,
                               double temperature, std::uint64_t seed);

/// Greedy pass@1 accuracy.
double eval_accuracy(const ToyPolicy& policy, const std::vector<QueryRecord>& testset);

/// Mean over response tokens of r - ln r - 1 with r = pi_ref / pi_theta.
double kl_k3(const ToyPolicy& policy, const ToyPolicy& reference, const QueryRecord& query,
             const ResponseRecord& response);

/// Gradient of the response's perplexity with respect to theta.
std::vector<double> ppl_gradient(const ToyPolicy& policy, const QueryRecord& query,
                                 const ResponseRecord& response);

}  // namespace consel
