#include "consel/types.hpp"

#include <algorithm>
#include <cmath>

namespace consel {

void validate(const ResponseRecord& r) {
  if (r.tokens.empty()) throw Error("empty response");
  if (r.token_logprobs.size() != r.tokens.size())
    throw Error("length mismatch: tokens vs token_logprobs for " + r.query_id);
  for (double lp : r.token_logprobs)
    if (!(lp <= 0.0)) throw Error("invalid logprob");
  if (r.has_entropies()) {
    if (r.token_entropies.size() != r.tokens.size())
      throw Error("length mismatch: tokens vs token_entropies for " + r.query_id);
    for (double h : r.token_entropies)
      if (!(h >= 0.0)) throw Error("invalid entropy");
  }
  if (r.has_margins()) {
    if (r.token_margins.size() != r.tokens.size())
      throw Error("length mismatch: tokens vs token_margins for " + r.query_id);
    for (double m : r.token_margins)
      if (!(m >= 0.0 && m <= 1.0)) throw Error("invalid margin");
  }
  if (r.reward != 0 && r.reward != 1) throw Error("invalid reward");
}

std::vector<int> ResponseGroup::rewards() const {
  std::vector<int> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(r.reward);
  return out;
}

void validate(const ResponseGroup& g) {
  if (g.responses.size() < 2) throw Error("group too small: " + g.query_id);
  for (const auto& r : g.responses) {
    if (r.query_id != g.query_id) throw Error("response query_id mismatch in group " + g.query_id);
    validate(r);
  }
}

bool GroupScore::degenerate() const {
  return std::all_of(advantages.begin(), advantages.end(), [](double a) { return a == 0.0; });
}

void validate(const SelectionConfig& c) {
  if (!(c.ratio_p > 0.0 && c.ratio_p <= 1.0)) throw Error("ratio_p must lie in (0, 1]");
  if (!(c.gamma > 0.0)) throw Error("gamma must be positive");
}

void validate(const PolicyParams& p) {
  if (p.shape.vocab <= 0 || p.shape.context_length <= 0 || p.shape.hidden_width <= 0)
    throw Error("invalid policy shape");
  if (p.theta.size() != p.shape.size()) throw Error("policy shape does not match parameter count");
  for (double v : p.theta)
    if (!std::isfinite(v)) throw Error("non-finite policy parameter");
}

void validate(const TrainConfig& c) {
  validate(c.selection);
  if (!(c.eta > 0.0)) throw Error("eta must be positive");
  if (c.k < 2) throw Error("K must be at least 2");
  if (c.g < 2) throw Error("G must be at least 2");
  if (c.steps < 0) throw Error("steps must be non-negative");
  if (!(c.temperature > 0.0)) throw Error("temperature must be positive");
  if (!(c.kl_coeff >= 0.0)) throw Error("kl_coeff must be non-negative");
  if (c.threads < 1) throw Error("threads must be at least 1");
  const double min_batch = std::ceil(1.0 / c.selection.ratio_p - 1e-9);
  if (c.batch_size < min_batch) throw Error("batch_size must be at least ceil(1 / ratio_p)");
}

double TheoremReport::relative_residual() const {
  if (delta_u_first_order == 0.0) return delta_u_measured == 0.0 ? 0.0 : INFINITY;
  return std::abs(delta_u_measured - delta_u_first_order) / std::abs(delta_u_first_order);
}

double TheoremReport::max_off_diagonal() const {
  double best = 0.0;
  for (std::size_t i = 0; i < orthogonality_matrix.size(); ++i)
    for (std::size_t j = 0; j < orthogonality_matrix[i].size(); ++j)
      if (i != j) best = std::max(best, std::abs(orthogonality_matrix[i][j]));
  return best;
}

std::string to_string(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::r_pb_offline: return "r_pb_offline";
    case SelectionMetric::r_pb_online: return "r_pb_online";
    case SelectionMetric::ppl: return "ppl";
    case SelectionMetric::entropy: return "entropy";
    case SelectionMetric::random: return "random";
    case SelectionMetric::k_center: return "k_center";
  }
  return "?";
}

std::string to_string(UncertaintyKind k) {
  switch (k) {
    case UncertaintyKind::ppl: return "ppl";
    case UncertaintyKind::entropy: return "entropy";
    case UncertaintyKind::margin: return "margin";
  }
  return "?";
}

std::string to_string(EntropyDirection d) {
  return d == EntropyDirection::larger_is_more_uncertain ? "larger_is_more_uncertain"
                                                          : "smaller_is_more_uncertain";
}

std::string to_string(AdvantageEstimator e) { return e == AdvantageEstimator::grpo ? "grpo" : "rloo"; }

SelectionMetric parse_selection_metric(const std::string& s) {
  for (auto m : {SelectionMetric::r_pb_offline, SelectionMetric::r_pb_online, SelectionMetric::ppl,
                 SelectionMetric::entropy, SelectionMetric::random, SelectionMetric::k_center})
    if (to_string(m) == s) return m;
  throw Error("unknown selection metric: " + s);
}

UncertaintyKind parse_uncertainty_kind(const std::string& s) {
  for (auto k : {UncertaintyKind::ppl, UncertaintyKind::entropy, UncertaintyKind::margin})
    if (to_string(k) == s) return k;
  throw Error("unknown uncertainty kind: " + s);
}

EntropyDirection parse_entropy_direction(const std::string& s) {
  for (auto d : {EntropyDirection::larger_is_more_uncertain, EntropyDirection::smaller_is_more_uncertain})
    if (to_string(d) == s) return d;
  throw Error("unknown entropy direction: " + s);
}

AdvantageEstimator parse_advantage_estimator(const std::string& s) {
  if (s == "grpo") return AdvantageEstimator::grpo;
  if (s == "rloo") return AdvantageEstimator::rloo;
  throw Error("unknown advantage estimator: " + s);
}

}  // namespace consel
