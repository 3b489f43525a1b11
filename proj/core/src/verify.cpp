#include "consel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "consel/consistency.hpp"
#include "consel/parallel.hpp"
#include "consel/reward.hpp"
#include "consel/trainer.hpp"
#include "consel/uncertainty.hpp"

namespace consel {

namespace {

constexpr std::size_t kMcChunks = 64;

// Two-sided standard normal quantile for the supported confidence levels.
double normal_quantile(double confidence) {
  if (confidence == 0.99) return 2.5758293035489004;
  if (confidence == 0.95) return 1.959963984540054;
  if (confidence == 0.999) return 3.2905267314919255;
  throw Error("unsupported confidence level");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

UDistribution UDistribution::discrete(std::vector<double> values) {
  if (values.empty()) throw Error("empty discrete distribution");
  UDistribution u;
  u.kind_ = Kind::discrete;
  u.values_ = std::move(values);
  return u;
}

UDistribution UDistribution::log_uniform(double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw Error("invalid log-uniform bounds");
  UDistribution u;
  u.kind_ = Kind::log_uniform;
  u.lo_ = lo;
  u.hi_ = hi;
  return u;
}

UDistribution UDistribution::constant(double value) {
  UDistribution u;
  u.kind_ = Kind::constant;
  u.lo_ = u.hi_ = value;
  return u;
}

double UDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::discrete: return values_[rng.below(values_.size())];
    case Kind::log_uniform: return std::exp(rng.uniform(std::log(lo_), std::log(hi_)));
    case Kind::constant: return lo_;
  }
  return lo_;
}

double UDistribution::support_min() const {
  if (kind_ == Kind::discrete) return *std::min_element(values_.begin(), values_.end());
  return lo_;
}

double UDistribution::mean() const {
  switch (kind_) {
    case Kind::discrete: {
      double s = 0.0;
      for (double v : values_) s += v;
      return s / static_cast<double>(values_.size());
    }
    case Kind::log_uniform: return (hi_ - lo_) / std::log(hi_ / lo_);
    case Kind::constant: return lo_;
  }
  return lo_;
}

double UDistribution::mean_reciprocal() const {
  switch (kind_) {
    case Kind::discrete: {
      double s = 0.0;
      for (double v : values_) s += 1.0 / v;
      return s / static_cast<double>(values_.size());
    }
    case Kind::log_uniform: return (1.0 / lo_ - 1.0 / hi_) / std::log(hi_ / lo_);
    case Kind::constant: return 1.0 / lo_;
  }
  return 1.0 / lo_;
}

TheoremReport mc_theorem1(std::span<const double> c, std::span<const double> d, const UDistribution& u,
                          std::size_t trials, std::uint64_t seed, double confidence, int threads) {
  if (c.size() != d.size() || c.empty()) throw Error("coefficient vectors must be non-empty and equal length");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!(c[i] * d[i] > 0.0)) throw Error("coefficients must satisfy c_i * d_i > 0");
  if (!(u.support_min() > 1.0)) throw Error("support violation: u must exceed 1");
  if (trials < 10000) throw Error("at least 10^4 trials required");
  const double z = normal_quantile(confidence);

  std::vector<double> p(trials), q(trials);
  const std::size_t per_chunk = (trials + kMcChunks - 1) / kMcChunks;
  parallel_for(kMcChunks, threads, [&](std::size_t chunk) {
    Rng rng(derive_seed(seed, {chunk}));
    const std::size_t begin = chunk * per_chunk;
    const std::size_t end = std::min(trials, begin + per_chunk);
    for (std::size_t t = begin; t < end; ++t) {
      double pt = 0.0, qt = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double ui = u.sample(rng);
        pt += c[i] * ui;
        qt += d[i] / ui;
      }
      p[t] = pt;
      q[t] = qt;
    }
  });

  const double n = static_cast<double>(trials);
  double mp = 0.0, mq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    mp += p[t];
    mq += q[t];
  }
  mp /= n;
  mq /= n;
  // Products z_t = (P_t - mean P)(Q_t - mean Q); the covariance is their
  // (n-1)-normalized sum and its standard error follows from their spread.
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) sum += (p[t] - mp) * (q[t] - mq);
  const double mean_prod = sum / n;
  double ss = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double e = (p[t] - mp) * (q[t] - mq) - mean_prod;
    ss += e * e;
  }
  const double se = std::sqrt(ss / (n - 1.0) / n);

  TheoremReport r;
  r.kind = "theorem1";
  r.covariance_estimate.value = sum / (n - 1.0);
  r.covariance_estimate.ci_low = r.covariance_estimate.value - z * se;
  r.covariance_estimate.ci_high = r.covariance_estimate.value + z * se;
  r.covariance_estimate.confidence = confidence;
  r.covariance_estimate.trials = trials;
  return r;
}

double theorem1_covariance(std::span<const double> c, std::span<const double> d, const UDistribution& u) {
  if (c.size() != d.size()) throw Error("coefficient vectors must have equal length");
  double cd = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) cd += c[i] * d[i];
  return cd * (1.0 - u.mean() * u.mean_reciprocal());
}

double group_uncertainty(const ToyPolicy& policy, const QueryRecord& query, const ResponseGroup& group) {
  double total = 0.0;
  for (const auto& r : group.responses) total += ppl(policy.rescore(query, r));
  return total;
}

TheoremReport check_theorem2_step(const ToyPolicy& policy, const QueryRecord& query, const ResponseGroup& group,
                                  double eta, AdvantageEstimator estimator) {
  validate(group);
  if (!(eta >= 0.0)) throw Error("eta must be non-negative");
  const auto adv = advantages(group.rewards(), estimator);
  if (std::all_of(adv.begin(), adv.end(), [](double a) { return a == 0.0; })) throw Error("no gradient");

  const std::size_t k = group.k();
  std::vector<std::vector<double>> grads(k);
  std::vector<double> u(k), norms(k);
  std::vector<double> grad_total(policy.size(), 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    u[j] = ppl(policy.rescore(query, group.responses[j]));
    grads[j] = ppl_gradient(policy, query, group.responses[j]);
    norms[j] = std::sqrt(dot(grads[j], grads[j]));
    for (std::size_t i = 0; i < grad_total.size(); ++i) grad_total[i] += grads[j][i];
  }

  const BatchItem item{&query, &group, adv};
  const auto lg = rlvr_loss_and_grad(policy, std::span<const BatchItem>(&item, 1));

  ToyPolicy stepped = policy;
  auto theta = stepped.theta();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * lg.grad[i];

  double u_before = 0.0;
  for (double x : u) u_before += x;

  TheoremReport r;
  r.kind = "theorem2";
  r.eta = eta;
  r.delta_u_measured = group_uncertainty(stepped, query, group) - u_before;
  r.delta_u_first_order = -eta * dot(grad_total, lg.grad);
  r.m = *std::min_element(norms.begin(), norms.end());
  r.big_m = *std::max_element(norms.begin(), norms.end());
  if (!(r.m > 0.0)) throw Error("zero-norm uncertainty gradient");
  r.gamma = (r.big_m * r.big_m) / (r.m * r.m);
  r.r_pb_online = r_pb_online(adv, u, r.gamma);
  r.bound_rhs = -eta * r.m * r.m * r.r_pb_online;

  r.orthogonality_matrix.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double v = std::clamp(dot(grads[i], grads[j]) / (norms[i] * norms[j]), -1.0, 1.0);
      r.orthogonality_matrix[i][j] = r.orthogonality_matrix[j][i] = v;
    }
  return r;
}

double Theorem2Trial::shrink_factor() const {
  const double a = std::abs(full.delta_u_measured - full.delta_u_first_order);
  const double b = std::abs(half.delta_u_measured - half.delta_u_first_order);
  return b == 0.0 ? INFINITY : a / b;
}

bool Theorem2Trial::bound_ok(double slack) const {
  return full.delta_u_measured <= full.bound_rhs + slack * std::abs(full.bound_rhs) + 1e-8;
}

std::vector<Theorem2Trial> theorem2_campaign(const ToyTaskSpec& task, int groups, int k, double eta,
                                             double init_scale, std::uint64_t seed) {
  if (groups < 1) throw Error("groups must be at least 1");
  std::vector<Theorem2Trial> out;
  const std::uint64_t max_attempts = 1000ULL * static_cast<std::uint64_t>(groups);
  for (std::uint64_t attempt = 0; attempt < max_attempts && out.size() < static_cast<std::size_t>(groups);
       ++attempt) {
    const auto policy = ToyPolicy::initial(task, init_scale, derive_seed(seed, {attempt, 0}));
    auto query = gen_task(task, 1, derive_seed(seed, {attempt, 1})).front();
    char id[24];
    std::snprintf(id, sizeof id, "g%05llu", static_cast<unsigned long long>(attempt));
    query.id = id;
    auto group = sample_responses(policy, query, k, 1.0, derive_seed(seed, {attempt, 2}));
    const auto rewards = group.rewards();
    const int k1 = static_cast<int>(std::count(rewards.begin(), rewards.end(), 1));
    if (k1 == 0 || k1 == k) continue;
    Theorem2Trial t{query, group, check_theorem2_step(policy, query, group, eta),
                    check_theorem2_step(policy, query, group, eta / 2.0)};
    out.push_back(std::move(t));
  }
  if (out.size() < static_cast<std::size_t>(groups)) throw Error("could not find enough mixed-reward groups");
  return out;
}

std::vector<std::vector<double>> grad_orthogonality_heatmap(const ToyPolicy& policy, const QueryRecord& query,
                                                            const ResponseGroup& group) {
  const std::size_t k = group.k();
  if (k < 2) throw Error("K must be at least 2");
  std::vector<std::vector<double>> grads(k);
  std::vector<double> norms(k);
  for (std::size_t j = 0; j < k; ++j) {
    grads[j] = ppl_gradient(policy, query, group.responses[j]);
    norms[j] = std::sqrt(dot(grads[j], grads[j]));
    if (!(norms[j] > 0.0)) throw Error("zero-norm gradient");
  }
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      m[i][j] = m[j][i] = std::clamp(dot(grads[i], grads[j]) / (norms[i] * norms[j]), -1.0, 1.0);
  return m;
}

std::vector<std::vector<double>> grad_orthogonality_heatmap(const ToyPolicy& policy, const QueryRecord& query,
                                                            int k, std::uint64_t seed) {
  return grad_orthogonality_heatmap(policy, query, sample_responses(policy, query, k, 1.0, seed));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("pearson needs two equal-length samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("zero variance");
  return sxy / std::sqrt(sxx * syy);
}

CorrelationResult offline_online_correlation(const std::vector<QueryRecord>& dataset, const ToyPolicy& policy,
                                             int k, double gamma, std::uint64_t seed, int threads) {
  if (dataset.size() < 50) throw Error("dataset must hold at least 50 queries");
  if (k < 16) throw Error("K must be at least 16");
  SelectionConfig cfg;
  cfg.gamma = gamma;
  cfg.uncertainty_kind = UncertaintyKind::ppl;

  std::vector<GroupScore> scores(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const auto group = sample_responses(policy, dataset[i], k, 1.0, derive_seed(seed, {i}));
    scores[i] = score_group(group, cfg);
  });

  CorrelationResult out;
  for (const auto& s : scores) {
    if (!s.r_pb || s.k0 == 0 || s.k1 == 0) continue;
    out.ids.push_back(s.query_id);
    out.offline.push_back(*s.r_pb);
    out.online.push_back(*s.r_pb_online);
  }
  if (out.ids.size() < 10) throw Error("insufficient data");
  out.correlation = pearson(out.offline, out.online);
  return out;
}

}  // namespace consel
