#include "consel/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consel/reward.hpp"
#include "consel/rng.hpp"

namespace consel {

namespace {

constexpr int kV = vocab::kSize;

void log_softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  const double lse = mx + std::log(s);
  for (double& v : z) v -= lse;
}

}  // namespace

PolicyShape ToyPolicy::shape_for(const ToyTaskSpec& spec) {
  validate(spec);
  const int l = spec.answer_length;
  return {kV, l, l * (spec.prompt_count() + kV + 1)};
}

ToyPolicy::ToyPolicy(ToyTaskSpec spec, PolicyParams params) : spec_(std::move(spec)), params_(std::move(params)) {
  validate(params_);
  if (!(params_.shape == shape_for(spec_))) throw Error("policy shape does not match task");
}

ToyPolicy ToyPolicy::initial(const ToyTaskSpec& spec, double init_scale, std::uint64_t seed) {
  PolicyParams p;
  p.shape = shape_for(spec);
  p.theta.assign(p.shape.size(), 0.0);
  if (init_scale > 0.0) {
    Rng rng(seed);
    for (double& v : p.theta) v = rng.uniform(-init_scale, init_scale);
  }
  return ToyPolicy(spec, std::move(p));
}

int ToyPolicy::prompt_index(std::string_view prompt) const {
  const ParsedPrompt p = parse_prompt(spec_, prompt);
  const int op = static_cast<int>(spec_.operators.find(p.op));
  const int r = spec_.operand_count();
  return (op * r + (p.a - spec_.operand_min)) * r + (p.b - spec_.operand_min);
}

ToyPolicy::Rows ToyPolicy::rows(int prompt, int position, TokenId prev) const {
  const auto p = static_cast<std::size_t>(spec_.prompt_count());
  const auto l = static_cast<std::size_t>(spec_.answer_length);
  const auto t = static_cast<std::size_t>(position);
  return {t * p + static_cast<std::size_t>(prompt), l * p + t * kV + static_cast<std::size_t>(prev),
          l * p + l * kV + t};
}

std::vector<double> ToyPolicy::log_probs(int prompt, int position, TokenId prev) const {
  std::vector<double> z(kV, 0.0);
  for (std::size_t row : rows(prompt, position, prev)) {
    const double* w = params_.theta.data() + row * kV;
    for (int v = 0; v < kV; ++v) z[v] += w[v];
  }
  log_softmax_inplace(z);
  return z;
}

ResponseRecord ToyPolicy::rescore(const QueryRecord& query, const ResponseRecord& response) const {
  if (response.tokens.empty()) throw Error("empty response");
  if (response.tokens.size() > static_cast<std::size_t>(spec_.answer_length))
    throw Error("response longer than the policy context");
  const int prompt = prompt_index(query.prompt);
  ResponseRecord out = response;
  out.token_logprobs.clear();
  out.token_entropies.clear();
  out.token_margins.clear();
  TokenId prev = vocab::kEquals;
  for (std::size_t t = 0; t < response.tokens.size(); ++t) {
    const auto lp = log_probs(prompt, static_cast<int>(t), prev);
    const TokenId y = response.tokens[t];
    out.token_logprobs.push_back(std::min(0.0, lp[static_cast<std::size_t>(y)]));
    double h = 0.0, top1 = 0.0, top2 = 0.0;
    for (double l : lp) {
      const double q = std::exp(l);
      if (q > 0.0) h -= q * l;
      if (q > top1) {
        top2 = top1;
        top1 = q;
      } else if (q > top2) {
        top2 = q;
      }
    }
    out.token_entropies.push_back(std::max(0.0, h));
    out.token_margins.push_back(std::clamp(top1 - top2, 0.0, 1.0));
    prev = y;
  }
  return out;
}

void ToyPolicy::add_logprob_grad(int prompt, std::span<const TokenId> tokens, std::span<const double> coeff,
                                 std::span<double> grad) const {
  if (grad.size() != params_.theta.size()) throw Error("gradient buffer has wrong size");
  TokenId prev = vocab::kEquals;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const double c = coeff[t];
    if (c != 0.0) {
      const auto lp = log_probs(prompt, static_cast<int>(t), prev);
      // d log softmax(z)_y / dz_v = [v == y] - pi_v, identical for each active row.
      for (std::size_t row : rows(prompt, static_cast<int>(t), prev)) {
        double* g = grad.data() + row * kV;
        for (int v = 0; v < kV; ++v) g[v] -= c * std::exp(lp[static_cast<std::size_t>(v)]);
        g[tokens[t]] += c;
      }
    }
    prev = tokens[t];
  }
}

std::vector<TokenId> ToyPolicy::greedy(const QueryRecord& query) const {
  const int prompt = prompt_index(query.prompt);
  std::vector<TokenId> out;
  TokenId prev = vocab::kEquals;
  for (int t = 0; t < spec_.answer_length; ++t) {
    const auto lp = log_probs(prompt, t, prev);
    const auto y = static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    out.push_back(y);
    if (y == vocab::kEos) break;
    prev = y;
  }
  return out;
}

ResponseGroup sample_responses(const ToyPolicy& policy, const QueryRecord& query, int k, double temperature,
                               std::uint64_t seed) {
  if (k < 2) throw Error("K must be at least 2");
  if (!(temperature > 0.0)) throw Error("temperature must be positive");
  const int prompt = policy.prompt_index(query.prompt);
  Rng rng(seed);
  ResponseGroup group;
  group.query_id = query.id;
  group.responses.reserve(static_cast<std::size_t>(k));
  std::vector<double> weights(kV);
  for (int s = 0; s < k; ++s) {
    ResponseRecord r;
    r.query_id = query.id;
    r.sample_index = s;
    TokenId prev = vocab::kEquals;
    for (int t = 0; t < policy.task().answer_length; ++t) {
      const auto lp = policy.log_probs(prompt, t, prev);
      const double mx = *std::max_element(lp.begin(), lp.end());
      for (int v = 0; v < kV; ++v) weights[v] = std::exp((lp[v] - mx) / temperature);
      const auto y = static_cast<TokenId>(rng.categorical(weights));
      r.tokens.push_back(y);
      if (y == vocab::kEos) break;
      prev = y;
    }
    r = policy.rescore(query, r);
    r.reward = verify_answer(vocab::decode_response(r.tokens), query.answer);
    group.responses.push_back(std::move(r));
  }
  return group;
}

double eval_accuracy(const ToyPolicy& policy, const std::vector<QueryRecord>& testset) {
  if (testset.empty()) throw Error("empty test set");
  int correct = 0;
  for (const auto& q : testset) correct += verify_answer(vocab::decode_response(policy.greedy(q)), q.answer);
  return static_cast<double>(correct) / static_cast<double>(testset.size());
}

double kl_k3(const ToyPolicy& policy, const ToyPolicy& reference, const QueryRecord& query,
             const ResponseRecord& response) {
  const auto cur = policy.rescore(query, response);
  const auto ref = reference.rescore(query, response);
  double total = 0.0;
  for (std::size_t t = 0; t < cur.tokens.size(); ++t) {
    const double lc = cur.token_logprobs[t];
    const double lr = ref.token_logprobs[t];
    if (!std::isfinite(lc) || !std::isfinite(lr)) throw Error("support mismatch");
    const double log_ratio = lr - lc;
    total += std::exp(log_ratio) - log_ratio - 1.0;
  }
  return total / static_cast<double>(cur.tokens.size());
}

std::vector<double> ppl_gradient(const ToyPolicy& policy, const QueryRecord& query,
                                 const ResponseRecord& response) {
  const auto scored = policy.rescore(query, response);
  const double len = static_cast<double>(scored.tokens.size());
  double mean_lp = 0.0;
  for (double lp : scored.token_logprobs) mean_lp += lp;
  mean_lp /= len;
  const double u = std::exp(-mean_lp);
  // PPL = exp(-mean log pi)  =>  dPPL = -PPL / |y| * sum_t d log pi_t
  std::vector<double> coeff(scored.tokens.size(), -u / len);
  std::vector<double> grad(policy.size(), 0.0);
  policy.add_logprob_grad(policy.prompt_index(query.prompt), scored.tokens, coeff, grad);
  return grad;
}

}  // namespace consel
