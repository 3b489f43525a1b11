#include "consel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "consel/consistency.hpp"
#include "consel/parallel.hpp"
#include "consel/rng.hpp"
#include "consel/uncertainty.hpp"

namespace consel {

namespace {

// Substream tags under the run seed.
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kGenerationStream = 2;
constexpr std::uint64_t kSelectionStream = 3;

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

VectorMap operand_embeddings(const ToyTaskSpec& task, const std::vector<const QueryRecord*>& queries) {
  VectorMap out;
  for (const auto* q : queries) {
    const auto p = parse_prompt(task, q->prompt);
    const auto op = static_cast<double>(task.operators.find(p.op));
    out.emplace(q->id, std::vector<double>{static_cast<double>(p.a), static_cast<double>(p.b), op});
  }
  return out;
}

std::vector<std::string> choose(const TrainConfig& config, const ToyTaskSpec& task, int step,
                                const std::vector<const QueryRecord*>& queries,
                                const std::vector<ResponseGroup>& groups, const std::vector<GroupScore>& scores,
                                const VectorMap* embeddings) {
  const auto& sel = config.selection;
  const double p = sel.ratio_p;
  switch (sel.metric) {
    case SelectionMetric::r_pb_online: {
      ScoreMap m;
      for (const auto& s : scores) m.emplace(s.query_id, online_rank_score(s));
      return select_online(m, p);
    }
    case SelectionMetric::r_pb_offline: {
      ScoreMap m;
      for (const auto& s : scores) m.emplace(s.query_id, s.r_pb);
      return select_offline(m, p);
    }
    case SelectionMetric::ppl:
    case SelectionMetric::entropy: {
      const auto kind = sel.metric == SelectionMetric::ppl ? UncertaintyKind::ppl : UncertaintyKind::entropy;
      std::map<std::string, double> m;
      for (const auto& g : groups) {
        double total = 0.0;
        for (const auto& r : g.responses) total += uncertainty(r, kind, sel.entropy_direction);
        m.emplace(g.query_id, total / static_cast<double>(g.k()));
      }
      return select_top_uncertainty(m, p);
    }
    case SelectionMetric::random: {
      std::vector<std::string> ids;
      for (const auto* q : queries) ids.push_back(q->id);
      return select_random(ids, p, derive_seed(config.seed, {kSelectionStream, static_cast<std::uint64_t>(step)}));
    }
    case SelectionMetric::k_center: {
      VectorMap m;
      if (embeddings) {
        for (const auto* q : queries) {
          auto it = embeddings->find(q->id);
          if (it == embeddings->end()) throw Error("no embedding for " + q->id);
          m.emplace(q->id, it->second);
        }
      } else {
        m = operand_embeddings(task, queries);
      }
      return select_kcenter(m, p);
    }
  }
  throw Error("unknown selection metric");
}

}  // namespace

LossAndGrad rlvr_loss_and_grad(const ToyPolicy& policy, std::span<const BatchItem> batch, double kl_coeff,
                               const ToyPolicy* reference) {
  LossAndGrad out;
  out.grad.assign(policy.size(), 0.0);
  if (batch.empty()) return out;
  if (kl_coeff > 0.0 && reference == nullptr) throw Error("KL penalty needs a reference policy");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<double> coeff;
  for (const auto& item : batch) {
    const auto& responses = item.group->responses;
    if (item.advantages.size() != responses.size()) throw Error("advantage count does not match group");
    const int prompt = policy.prompt_index(item.query->prompt);
    const double inv_k = 1.0 / static_cast<double>(responses.size());
    for (std::size_t k = 0; k < responses.size(); ++k) {
      const double adv = item.advantages[k];
      if (!std::isfinite(adv)) throw Error("non-finite advantage");
      const auto cur = policy.rescore(*item.query, responses[k]);
      const double inv_len = 1.0 / static_cast<double>(cur.tokens.size());
      coeff.assign(cur.tokens.size(), 0.0);

      if (adv != 0.0) {
        double sum_lp = 0.0;
        for (double lp : cur.token_logprobs) sum_lp += lp;
        out.loss -= inv_batch * inv_k * inv_len * adv * sum_lp;
        for (double& c : coeff) c = -inv_batch * inv_k * inv_len * adv;
      }
      if (kl_coeff > 0.0) {
        const auto ref = reference->rescore(*item.query, responses[k]);
        for (std::size_t t = 0; t < cur.tokens.size(); ++t) {
          const double log_ratio = ref.token_logprobs[t] - cur.token_logprobs[t];
          const double r = std::exp(log_ratio);
          out.loss += kl_coeff * inv_batch * inv_k * inv_len * (r - log_ratio - 1.0);
          // d(r - ln r - 1)/d theta = (1 - r) d log pi_theta / d theta
          coeff[t] += kl_coeff * inv_batch * inv_k * inv_len * (1.0 - r);
        }
      }
      policy.add_logprob_grad(prompt, cur.tokens, coeff, out.grad);
    }
  }
  return out;
}

TrainResult train_loop(const TrainConfig& config, const ToyTaskSpec& task, const std::vector<QueryRecord>& dataset,
                       const std::vector<QueryRecord>& testset, const VectorMap* embeddings) {
  validate(config);
  return train_loop(config, ToyPolicy::initial(task, config.init_scale, derive_seed(config.seed, {0})), dataset,
                    testset, embeddings);
}

TrainResult train_loop(const TrainConfig& config, ToyPolicy initial, const std::vector<QueryRecord>& dataset,
                       const std::vector<QueryRecord>& testset, const VectorMap* embeddings) {
  validate(config);
  if (dataset.empty()) throw Error("empty dataset");
  if (testset.empty()) throw Error("empty test set");
  if (static_cast<std::size_t>(config.batch_size) > dataset.size())
    throw Error("batch_size exceeds dataset size");
  {
    std::map<std::string, int> seen;
    for (const auto& q : dataset)
      if (++seen[q.id] > 1) throw Error("duplicate query id: " + q.id);
  }

  const ToyPolicy reference = initial;
  TrainResult result{{}, std::move(initial)};
  ToyPolicy& policy = result.policy;
  const auto& sel = config.selection;
  const auto b = static_cast<std::size_t>(config.batch_size);

  for (int step = 0; step < config.steps; ++step) {
    const auto ustep = static_cast<std::uint64_t>(step);
    Rng batch_rng(derive_seed(config.seed, {kBatchStream, ustep}));
    const auto picks = batch_rng.sample_without_replacement(dataset.size(), b);
    std::vector<const QueryRecord*> queries;
    for (auto i : picks) queries.push_back(&dataset[i]);

    std::vector<ResponseGroup> groups(b);
    std::vector<GroupScore> scores(b);
    parallel_for(b, config.threads, [&](std::size_t i) {
      groups[i] = sample_responses(policy, *queries[i], config.g, config.temperature,
                                   derive_seed(config.seed, {kGenerationStream, ustep, picks[i]}));
      scores[i] = score_group(groups[i], sel, config.advantage_estimator);
    });

    StepMetrics m;
    m.step = step;
    m.selected_ids = choose(config, policy.task(), step, queries, groups, scores, embeddings);

    // Accumulate in ascending query-id order so the update is independent of
    // selection order.
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < b; ++i)
      if (std::find(m.selected_ids.begin(), m.selected_ids.end(), queries[i]->id) != m.selected_ids.end())
        chosen.push_back(i);
    std::sort(chosen.begin(), chosen.end(),
              [&](std::size_t x, std::size_t y) { return queries[x]->id < queries[y]->id; });
    std::vector<BatchItem> batch;
    for (auto i : chosen) batch.push_back({queries[i], &groups[i], scores[i].advantages});

    // Per-step statistics over every generated response.
    std::size_t responses = 0, tokens = 0;
    double reward_sum = 0.0, entropy_sum = 0.0;
    std::vector<double> all_u;
    for (std::size_t i = 0; i < b; ++i) {
      for (const auto& r : groups[i].responses) {
        ++responses;
        tokens += r.tokens.size();
        reward_sum += r.reward;
        for (double h : r.token_entropies) entropy_sum += h;
      }
      all_u.insert(all_u.end(), scores[i].uncertainties.begin(), scores[i].uncertainties.end());
    }
    m.mean_reward = reward_sum / static_cast<double>(responses);
    m.policy_entropy = entropy_sum / static_cast<double>(tokens);
    m.mean_response_length = static_cast<double>(tokens) / static_cast<double>(responses);

    // Norm of each signal-bearing response's own loss gradient, split by
    // whether its uncertainty agrees with its reward (median split).
    const double u_median = median(all_u);
    double norm_sum = 0.0, cons_sum = 0.0, incons_sum = 0.0;
    int norm_n = 0, cons_n = 0, incons_n = 0;
    std::vector<double> g(policy.size());
    for (std::size_t i = 0; i < b; ++i) {
      const int prompt = policy.prompt_index(queries[i]->prompt);
      const auto& rs = groups[i].responses;
      for (std::size_t k = 0; k < rs.size(); ++k) {
        const double adv = scores[i].advantages[k];
        if (adv == 0.0) continue;
        std::fill(g.begin(), g.end(), 0.0);
        std::vector<double> coeff(rs[k].tokens.size(), -adv / static_cast<double>(rs[k].tokens.size()));
        policy.add_logprob_grad(prompt, rs[k].tokens, coeff, g);
        const double n = l2_norm(g);
        norm_sum += n;
        ++norm_n;
        const double u = scores[i].uncertainties[k];
        const bool consistent = (rs[k].reward == 1 && u < u_median) || (rs[k].reward == 0 && u > u_median);
        if (consistent) {
          cons_sum += n;
          ++cons_n;
        } else {
          incons_sum += n;
          ++incons_n;
        }
      }
    }
    m.mean_grad_norm = norm_n ? norm_sum / norm_n : 0.0;
    m.grad_norm_consistent = cons_n ? cons_sum / cons_n : 0.0;
    m.grad_norm_inconsistent = incons_n ? incons_sum / incons_n : 0.0;

    const auto lg = rlvr_loss_and_grad(policy, batch, config.kl_coeff, &reference);
    auto theta = policy.theta();
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= config.eta * lg.grad[j];

    m.test_accuracy = eval_accuracy(policy, testset);
    result.metrics.push_back(std::move(m));
  }
  return result;
}

}  // namespace consel
