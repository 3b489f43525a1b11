#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace consel {

/// Raised for every contract violation in the library. The message is the
/// short reason string (e.g. "empty response"), optionally followed by detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TokenId = std::int32_t;

/// One training query with its reference answer.
struct QueryRecord {
  std::string id;
  std::string prompt;
  std::string answer;

  bool operator==(const QueryRecord&) const = default;
};

/// One sampled response. Optional traces are empty when unavailable.
struct ResponseRecord {
  std::string query_id;
  int sample_index = 0;
  std::vector<TokenId> tokens;
  std::vector<double> token_logprobs;
  std::vector<double> token_entropies;
  std::vector<double> token_margins;
  int reward = 0;

  bool has_entropies() const { return !token_entropies.empty(); }
  bool has_margins() const { return !token_margins.empty(); }

  bool operator==(const ResponseRecord&) const = default;
};

/// Throws Error when the record breaks a length or range invariant.
void validate(const ResponseRecord& r);

/// K responses to one query.
struct ResponseGroup {
  std::string query_id;
  std::vector<ResponseRecord> responses;

  std::size_t k() const { return responses.size(); }
  std::vector<int> rewards() const;

  bool operator==(const ResponseGroup&) const = default;
};

void validate(const ResponseGroup& g);

/// Per-query statistics over a group. `r_pb` is empty when the uncertainties
/// have zero spread but the rewards are mixed.
struct GroupScore {
  std::string query_id;
  std::vector<double> uncertainties;
  std::vector<double> advantages;
  int k0 = 0;
  int k1 = 0;
  std::optional<double> r_pb;
  std::optional<double> r_pb_online;

  /// True when no advantage is nonzero: the group carries no gradient.
  bool degenerate() const;
};

enum class SelectionMetric { r_pb_offline, r_pb_online, ppl, entropy, random, k_center };
enum class UncertaintyKind { ppl, entropy, margin };

/// Which reading of entropy (and, oppositely, margin) counts as uncertain.
/// `larger_is_more_uncertain` is the usual convention: high entropy or a
/// small top-2 margin means uncertain. `smaller_is_more_uncertain` flips both.
enum class EntropyDirection { larger_is_more_uncertain, smaller_is_more_uncertain };

enum class AdvantageEstimator { grpo, rloo };

struct SelectionConfig {
  double ratio_p = 0.3;
  SelectionMetric metric = SelectionMetric::r_pb_online;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  UncertaintyKind uncertainty_kind = UncertaintyKind::ppl;
  EntropyDirection entropy_direction = EntropyDirection::larger_is_more_uncertain;
};

void validate(const SelectionConfig& c);

/// Layout of the toy policy's weight table: one row of `vocab` logits per
/// context feature.
struct PolicyShape {
  int vocab = 0;
  int context_length = 0;  // maximum generated positions
  int hidden_width = 0;    // number of context-feature rows

  std::size_t size() const {
    return static_cast<std::size_t>(vocab) * static_cast<std::size_t>(hidden_width);
  }
  bool operator==(const PolicyShape&) const = default;
};

struct PolicyParams {
  PolicyShape shape;
  std::vector<double> theta;

  bool operator==(const PolicyParams&) const = default;
};

void validate(const PolicyParams& p);

struct TrainConfig {
  double eta = 5.0;
  int k = 8;
  int g = 8;
  int batch_size = 32;
  int steps = 300;
  double temperature = 1.0;
  double kl_coeff = 0.0;
  AdvantageEstimator advantage_estimator = AdvantageEstimator::grpo;
  SelectionConfig selection;
  std::uint64_t seed = 0;
  double init_scale = 0.0;
  int threads = 1;
};

void validate(const TrainConfig& c);

struct CovarianceEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence = 0.99;
  std::size_t trials = 0;
};

/// Result of one theorem check. Theorem-1 runs fill `covariance_estimate`;
/// single-step checks fill the uncertainty-change fields.
struct TheoremReport {
  std::string kind;
  double eta = 0.0;
  double delta_u_measured = 0.0;
  double delta_u_first_order = 0.0;
  double bound_rhs = 0.0;
  double gamma = 0.0;
  double r_pb_online = 0.0;
  double m = 0.0;
  double big_m = 0.0;
  std::vector<std::vector<double>> orthogonality_matrix;
  CovarianceEstimate covariance_estimate;

  double relative_residual() const;
  double max_off_diagonal() const;
};

// Enum <-> string, used by the config loader and serializers.
std::string to_string(SelectionMetric m);
std::string to_string(UncertaintyKind k);
std::string to_string(EntropyDirection d);
std::string to_string(AdvantageEstimator e);
SelectionMetric parse_selection_metric(const std::string& s);
UncertaintyKind parse_uncertainty_kind(const std::string& s);
EntropyDirection parse_entropy_direction(const std::string& s);
AdvantageEstimator parse_advantage_estimator(const std::string& s);

}  // namespace consel
