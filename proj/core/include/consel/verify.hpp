#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "consel/policy.hpp"
#include "consel/rng.hpp"
#include "consel/types.hpp"

namespace consel {

/// Distribution of the i.i.d. uncertainty draws in the covariance experiment.
class UDistribution {
 public:
  /// Uniform over a finite set of values.
  static UDistribution discrete(std::vector<double> values);
  /// log u uniform on [log lo, log hi].
  static UDistribution log_uniform(double lo, double hi);
  static UDistribution constant(double value);

  double sample(Rng& rng) const;
  double support_min() const;
  /// Closed-form E[u] and E[1/u].
  double mean() const;
  double mean_reciprocal() const;

 private:
  enum class Kind { discrete, log_uniform, constant };
  Kind kind_ = Kind::constant;
  std::vector<double> values_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// Monte Carlo estimate of Cov(P, Q) with P = sum c_i u_i and Q = sum d_i / u_i
/// over i.i.d. u_i, with a normal-approximation confidence interval. Trials
/// run on fixed substreams and reduce in order, so `threads` never changes
/// the result.
TheoremReport mc_theorem1(std::span<const double> c, std::span<const double> d, const UDistribution& u,
                          std::size_t trials, std::uint64_t seed, double confidence = 0.99, int threads = 1);

/// Closed form sum_i c_i d_i (1 - E[u] E[1/u]).
double theorem1_covariance(std::span<const double> c, std::span<const double> d, const UDistribution& u);

/// Total perplexity of the group's token sequences re-scored under `policy`.
double group_uncertainty(const ToyPolicy& policy, const QueryRecord& query, const ResponseGroup& group);

/// One gradient step of size `eta` on the group's policy-gradient loss.
/// Reports the measured change in total perplexity, its first-order
/// prediction, the per-response gradient-norm extremes m and M, and the
/// bound -eta m^2 r_online evaluated at gamma = M^2 / m^2.
TheoremReport check_theorem2_step(const ToyPolicy& policy, const QueryRecord& query, const ResponseGroup& group,
                                  double eta, AdvantageEstimator estimator = AdvantageEstimator::grpo);

/// One group checked at `eta` and at `eta / 2`.
struct Theorem2Trial {
  QueryRecord query;
  ResponseGroup group;
  TheoremReport full;
  TheoremReport half;

  /// Residual at eta over residual at eta/2; about 4 for an O(eta^2) residual.
  double shrink_factor() const;
  bool first_order_ok(double tolerance = 0.05) const { return full.relative_residual() < tolerance; }
  /// Measured change within `slack` (relative) of the bound, plus 1e-8.
  bool bound_ok(double slack = 0.05) const;
};

/// Draws `groups` independent (random policy, query, K responses) triples
/// whose rewards are mixed and checks each one. Policies are initialised
/// with entries uniform on [-init_scale, init_scale].
std::vector<Theorem2Trial> theorem2_campaign(const ToyTaskSpec& task, int groups, int k, double eta,
                                             double init_scale, std::uint64_t seed);

/// Normalized inner products of per-response perplexity gradients.
std::vector<std::vector<double>> grad_orthogonality_heatmap(const ToyPolicy& policy, const QueryRecord& query,
                                                            const ResponseGroup& group);
std::vector<std::vector<double>> grad_orthogonality_heatmap(const ToyPolicy& policy, const QueryRecord& query,
                                                            int k, std::uint64_t seed);

struct CorrelationResult {
  double correlation = 0.0;
  std::vector<double> offline;  // r_pb per scored query
  std::vector<double> online;   // r_pb_online per scored query
  std::vector<std::string> ids;
};

/// Scores every query with both consistency metrics (perplexity
/// uncertainty) and returns their Pearson correlation across queries.
/// Queries whose offline score is undefined, or whose rewards are all equal,
/// are skipped.
CorrelationResult offline_online_correlation(const std::vector<QueryRecord>& dataset, const ToyPolicy& policy,
                                             int k, double gamma, std::uint64_t seed, int threads = 1);

/// Population Pearson correlation; throws "zero variance" for constant input.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace consel
