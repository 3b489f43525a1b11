// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "consel/consistency.hpp"
#include "consel/io.hpp"
#include "consel/policy.hpp"
#include "consel/reward.hpp"
#include "consel/rng.hpp"
#include "consel/selection.hpp"
#include "consel/toy_task.hpp"
#include "consel/trainer.hpp"
#include "consel/verify.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace consel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// 1. r_pb_offline agrees with a textbook Pearson on random mixed groups.
Outcome pearson_equivalence() {
  Rng rng(derive_seed(1, {1}));
  const int ks[] = {4, 8, 64};
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    const int k = ks[rng.below(3)];
    std::vector<double> u(static_cast<std::size_t>(k)), r(static_cast<std::size_t>(k));
    std::vector<int> ri(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      u[i] = 1.0 + rng.uniform(0.0, 20.0);
      ri[i] = static_cast<int>(rng.below(2));
      r[i] = ri[i];
    }
    const int k1 = std::accumulate(ri.begin(), ri.end(), 0);
    if (k1 == 0 || k1 == k) continue;
    const auto got = r_pb_offline(u, ri);
    if (!got) return {false, "undefined score on a group with spread"};
    worst = std::max(worst, std::abs(*got - oracle::pearson(u, r)));
    ++done;
  }
  return {worst < 1e-10, "1000 groups, max |diff| " + fmt("%.3g", worst)};
}

// 2. Negative covariance of P = sum c u and Q = sum d / u.
Outcome theorem1() {
  Rng rng(derive_seed(2, {1}));
  std::vector<double> c(8), d(8);
  for (int i = 0; i < 8; ++i) {
    c[i] = rng.uniform(0.1, 2.0);
    d[i] = rng.uniform(0.1, 2.0);
  }
  const auto main = mc_theorem1(c, d, UDistribution::log_uniform(1.1, 10.0), 100000, derive_seed(2, {2}));
  const std::vector<double> one = {1.0};
  const auto two = mc_theorem1(one, one, UDistribution::discrete({2.0, 4.0}), 100000, derive_seed(2, {3}));
  const auto& m = main.covariance_estimate;
  const auto& t = two.covariance_estimate;
  const bool ok = m.ci_high < 0.0 && t.ci_low <= -0.125 && -0.125 <= t.ci_high;
  return {ok, "K=8 CI [" + fmt("%.4g", m.ci_low) + ", " + fmt("%.4g", m.ci_high) + "]; two-point CI [" +
                  fmt("%.4g", t.ci_low) + ", " + fmt("%.4g", t.ci_high) + "] vs -0.125"};
}

std::vector<Theorem2Trial> theorem2_trials() {
  static const auto trials = theorem2_campaign(ToyTaskSpec{}, 40, 8, 1e-4, 1.0, derive_seed(3, {1}));
  return trials;
}

// 3. One gradient step changes U as the first-order expansion predicts.
Outcome theorem2_first_order() {
  const auto trials = theorem2_trials();
  int first = 0, shrink = 0;
  for (const auto& t : trials) {
    first += t.first_order_ok(0.05);
    const double s = t.shrink_factor();
    shrink += s >= 3.0 && s <= 5.0;
  }
  const double n = static_cast<double>(trials.size());
  const bool ok = trials.size() >= 20 && first >= 0.95 * n && shrink >= 0.95 * n;
  return {ok, std::to_string(trials.size()) + " groups: residual < 5% in " + std::to_string(first) +
                  ", halving eta shrinks it by [3,5] in " + std::to_string(shrink)};
}

// 4. The measured change respects the bound with gamma = M^2 / m^2.
Outcome theorem2_bound() {
  const auto trials = theorem2_trials();
  int ok_count = 0;
  double viol_offdiag = 0.0, pass_offdiag = 0.0;
  int violations = 0;
  for (const auto& t : trials) {
    if (t.bound_ok(0.05)) {
      ++ok_count;
      pass_offdiag += t.full.max_off_diagonal();
    } else {
      ++violations;
      viol_offdiag += t.full.max_off_diagonal();
    }
  }
  const double n = static_cast<double>(trials.size());
  std::string detail = std::to_string(ok_count) + "/" + std::to_string(trials.size()) + " within bound";
  if (ok_count > 0) detail += "; mean max off-diagonal (passing) " + fmt("%.3f", pass_offdiag / ok_count);
  if (violations > 0) detail += ", (violating) " + fmt("%.3f", viol_offdiag / violations);
  return {ok_count >= 0.9 * n, detail};
}

// 5. Offline and online consistency scores move in opposite directions.
Outcome correlation_sign() {
  ToyTaskSpec task;
  task.modulus = 20;
  task.answer_length = 2;
  task.operators = "+-";
  int negative = 0;
  std::string values;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto queries = gen_task(task, 200, derive_seed(seed, {5, 1}));
    const auto policy = ToyPolicy::initial(task, 1.0, derive_seed(seed, {5, 2}));
    const auto r = offline_online_correlation(queries, policy, 64, 1.0, derive_seed(seed, {5, 3}));
    negative += r.correlation < -0.2;
    values += (values.empty() ? "" : ", ") + fmt("%.3f", r.correlation);
  }
  return {negative == 3, "correlations " + values};
}

// 6. Online consistency selection trains at least as well as random selection.
Outcome training_comparison() {
  ToyTaskSpec task;  // single-digit answers mod 10
  double sum_online = 0.0, sum_random = 0.0;
  int wins = 0;
  std::string pairs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto train = gen_task(task, 200, derive_seed(seed, {11}));
    const auto test = gen_task(task, 200, derive_seed(seed, {12}));
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.selection.ratio_p = 0.3;
    cfg.selection.metric = SelectionMetric::r_pb_online;
    const double online = train_loop(cfg, task, train, test).metrics.back().test_accuracy;
    cfg.selection.metric = SelectionMetric::random;
    const double random = train_loop(cfg, task, train, test).metrics.back().test_accuracy;
    sum_online += online;
    sum_random += random;
    wins += online >= random;
    pairs += (pairs.empty() ? "" : " ") + fmt("%.3f", online) + "/" + fmt("%.3f", random);
  }
  const bool ok = sum_online >= sum_random && wins >= 4;
  return {ok, "mean " + fmt("%.3f", sum_online / 5) + " vs " + fmt("%.3f", sum_random / 5) + ", paired wins " +
                  std::to_string(wins) + "/5 (" + pairs + ")"};
}

// 7. GRPO and RLOO invariants on random reward groups.
Outcome advantage_invariants() {
  Rng rng(derive_seed(7, {1}));
  double worst_mean = 0.0, worst_std = 0.0, worst_rloo = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t k = 2 + rng.below(63);
    std::vector<double> r(k);
    for (double& v : r) v = static_cast<double>(rng.below(2));
    const auto g = grpo_advantages(r);
    const auto l = rloo_advantages(r);
    const double n = static_cast<double>(k);
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
    double var = 0.0;
    for (double v : g) var += (v - mean) * (v - mean) / n;
    worst_mean = std::max(worst_mean, std::abs(mean));
    if (var > 0.0) worst_std = std::max(worst_std, std::abs(std::sqrt(var) - 1.0));
    worst_rloo = std::max(worst_rloo, std::abs(std::accumulate(l.begin(), l.end(), 0.0)));
  }
  const bool ok = worst_mean < 1e-12 && worst_std < 1e-9 && worst_rloo < 1e-12;
  return {ok, "max |mean| " + fmt("%.2g", worst_mean) + ", max |std-1| " + fmt("%.2g", worst_std) +
                  ", max |rloo sum| " + fmt("%.2g", worst_rloo)};
}

// 8. Analytic loss gradient against central differences.
Outcome gradient_oracle() {
  ToyTaskSpec task;
  task.modulus = 12;
  task.operand_max = 3;
  task.answer_length = 2;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto policy = ToyPolicy::initial(task, 1.0, derive_seed(8, {i}));
    const auto queries = gen_task(task, 2, derive_seed(8, {i, 1}));
    std::vector<ResponseGroup> groups;
    for (std::size_t q = 0; q < queries.size(); ++q)
      groups.push_back(sample_responses(policy, queries[q], 4, 1.0, derive_seed(8, {i, 2, q})));
    Rng rng(derive_seed(8, {i, 3}));
    std::vector<BatchItem> batch;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      std::vector<double> adv(4);
      for (double& a : adv) a = rng.uniform(-1.5, 1.5);
      batch.push_back({&queries[q], &groups[q], adv});
    }
    const auto analytic = rlvr_loss_and_grad(policy, batch).grad;
    const std::vector<double> theta(policy.theta().begin(), policy.theta().end());
    auto loss = [&](const std::vector<double>& th) {
      PolicyParams p = policy.params();
      p.theta = th;
      return rlvr_loss_and_grad(ToyPolicy(task, p), batch).loss;
    };
    const auto numeric = oracle::central_diff(loss, theta, 1e-5);
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      diff += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
      norm += numeric[j] * numeric[j];
    }
    worst = std::max(worst, std::sqrt(diff / norm));
  }
  return {worst < 1e-5, "10 policies, max relative error " + fmt("%.2g", worst)};
}

// 9. Every CLI command is byte-reproducible; selections survive a round trip.
Outcome determinism() {
  testing::TempDir root("consel_accept");
  const std::string out = (root / "run").string();
  const std::vector<std::vector<std::string>> commands = {
      {"gen-task", "--n", "60", "--seed", "9"},
      {"sample", "--queries", out + "/queries.jsonl", "--k", "8", "--init-scale", "1.0", "--seed", "9"},
      {"score-offline", "--responses", out + "/responses.jsonl"},
      {"select-offline", "--responses", out + "/responses.jsonl", "--seed", "9"},
      {"train-online", "--queries", out + "/queries.jsonl", "--testset", out + "/testset.jsonl", "--steps", "5",
       "--seed", "9"},
      {"verify-theorem1", "--trials", "10000", "--seed", "9"},
      {"verify-theorem2", "--groups", "4", "--seed", "9"},
      {"grad-heatmap", "--k", "4", "--seed", "9"},
      {"correlate", "--n", "60", "--k", "16", "--seed", "9"},
      {"report", "--seed", "9"},
  };
  auto run_all = [&]() -> std::string {
    fs::create_directories(out);
    for (auto args : commands) {
      args.push_back("--out");
      args.push_back(out);
      std::ostringstream so, se;
      if (cli::run(args, so, se) != 0) return args[0] + " failed: " + se.str();
    }
    return "";
  };
  if (auto e = run_all(); !e.empty()) return {false, e};
  fs::rename(out, root / "first");
  if (auto e = run_all(); !e.empty()) return {false, e};

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root / "first")) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    if (!fs::exists(fs::path(out) / name)) return {false, name + " missing on second run"};
    if (io::read_text(root / "first" / name) != io::read_text(fs::path(out) / name))
      return {false, name + " differs between runs"};
  }
  for (const char* required : {"selection.json", "metrics.csv"})
    if (!fs::exists(fs::path(out) / required)) return {false, std::string(required) + " not produced"};

  const auto loaded = io::load_selection(fs::path(out) / "selection.json");
  io::persist_selection(loaded, root / "again.json");
  const bool identity = io::load_selection(root / "again.json") == loaded &&
                        io::read_text(root / "again.json") == io::read_text(fs::path(out) / "selection.json");
  return {identity, std::to_string(names.size()) + " artifacts byte-identical across runs; load/persist " +
                        (identity ? "is" : "is NOT") + " the identity"};
}

// 10. Groups whose rewards all agree carry no signal and are never selected
// ahead of informative ones.
Outcome degenerate_handling() {
  ToyTaskSpec task;
  const auto policy = ToyPolicy::initial(task, 1.0, derive_seed(10, {1}));
  const auto queries = gen_task(task, 60, derive_seed(10, {2}));
  std::vector<ResponseGroup> groups;
  for (std::size_t i = 0; i < queries.size(); ++i)
    groups.push_back(sample_responses(policy, queries[i], 8, 1.0, derive_seed(10, {3, i})));
  // Force some groups to all-correct and some to all-incorrect.
  for (std::size_t i = 0; i < groups.size(); i += 3)
    for (auto& r : groups[i].responses) r.reward = (i / 3) % 2;

  SelectionConfig cfg;
  ScoreMap ranking;
  std::size_t degenerate = 0, defined = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto s = score_group(groups[i], cfg);
    const auto rewards = groups[i].rewards();
    const bool flat = std::all_of(rewards.begin(), rewards.end(), [&](int r) { return r == rewards[0]; });
    if (flat) {
      ++degenerate;
      const auto rloo = advantages(rewards, AdvantageEstimator::rloo);
      const bool zero_adv = std::all_of(s.advantages.begin(), s.advantages.end(), [](double a) { return a == 0.0; }) &&
                            std::all_of(rloo.begin(), rloo.end(), [](double a) { return a == 0.0; });
      if (!s.r_pb || *s.r_pb != 0.0 || !zero_adv || !s.r_pb_online || *s.r_pb_online != 0.0)
        return {false, "degenerate group " + queries[i].id + " has a nonzero score"};
      const BatchItem item{&queries[i], &groups[i], s.advantages};
      const auto grad = rlvr_loss_and_grad(policy, std::span<const BatchItem>(&item, 1), 0.0).grad;
      if (std::any_of(grad.begin(), grad.end(), [](double g) { return g != 0.0; }))
        return {false, "degenerate group " + queries[i].id + " has a nonzero gradient"};
    } else {
      ++defined;
    }
    ranking[queries[i].id] = online_rank_score(s);
  }
  if (degenerate == 0 || defined == 0) return {false, "test set lacks both kinds of group"};
  bool never_selected = true;
  for (double p = 0.05; p <= 1.0 + 1e-12; p += 0.05) {
    const auto chosen = select_online(ranking, std::min(p, 1.0));
    const std::size_t defined_chosen =
        std::count_if(chosen.begin(), chosen.end(), [&](const std::string& id) { return ranking.at(id).has_value(); });
    if (defined_chosen < std::min(chosen.size(), defined)) never_selected = false;
  }
  return {never_selected, std::to_string(degenerate) + " degenerate and " + std::to_string(defined) +
                              " informative groups; degenerate groups rank behind every defined score"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"pearson equivalence", pearson_equivalence, 1.0},
      {"negative covariance", theorem1, 10.0},
      {"first-order uncertainty change", theorem2_first_order, 60.0},
      {"uncertainty change bound", theorem2_bound, 60.0},
      {"offline/online correlation sign", correlation_sign, 120.0},
      {"consistency vs random selection", training_comparison, 600.0},
      {"advantage invariants", advantage_invariants, 60.0},
      {"gradient oracle", gradient_oracle, 60.0},
      {"determinism and round trip", determinism, 300.0},
      {"degenerate groups", degenerate_handling, 60.0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > criteria[i].budget_seconds) {
      o.pass = false;
      o.detail += "; over the time budget";
    }
    failed += !o.pass;
    std::printf("%s  %2zu %-34s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
