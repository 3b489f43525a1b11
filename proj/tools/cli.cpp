#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "consel/consistency.hpp"
#include "consel/io.hpp"
#include "consel/parallel.hpp"
#include "consel/rng.hpp"
#include "consel/selection.hpp"
#include "consel/trainer.hpp"
#include "consel/uncertainty.hpp"
#include "consel/verify.hpp"

namespace consel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Substream tags for datasets generated on the fly.
constexpr std::uint64_t kTrainSetStream = 101;
constexpr std::uint64_t kTestSetStream = 102;
constexpr std::uint64_t kPolicyStream = 103;
constexpr std::uint64_t kSampleStream = 104;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

struct Options {
  Common common;
  // shared inputs
  std::string queries, testset, responses, policy, embeddings, selection, in;
  // overrides
  std::optional<int> n, k, groups, steps;
  std::optional<double> ratio, gamma, eta, temperature, init_scale;
  std::optional<std::string> metric, uncertainty_kind, estimator;
  std::size_t trials = 100000;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Flat key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Root seed (overrides the config file)");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
}

io::RunConfig resolve(const Options& o) {
  io::RunConfig rc;
  if (!o.common.config.empty()) io::apply_config(rc, io::load_config(o.common.config));
  auto& t = rc.train;
  if (o.common.seed) t.seed = t.selection.seed = *o.common.seed;
  if (o.k) t.k = *o.k;
  if (o.steps) t.steps = *o.steps;
  if (o.ratio) t.selection.ratio_p = *o.ratio;
  if (o.gamma) t.selection.gamma = *o.gamma;
  if (o.eta) t.eta = *o.eta;
  if (o.temperature) t.temperature = *o.temperature;
  if (o.init_scale) t.init_scale = *o.init_scale;
  if (o.metric) t.selection.metric = parse_selection_metric(*o.metric);
  if (o.uncertainty_kind) t.selection.uncertainty_kind = parse_uncertainty_kind(*o.uncertainty_kind);
  if (o.estimator) t.advantage_estimator = parse_advantage_estimator(*o.estimator);
  t.threads = o.threads;
  validate(rc.task);
  validate(t.selection);
  return rc;
}

std::vector<QueryRecord> train_queries(const Options& o, const io::RunConfig& rc) {
  if (!o.queries.empty()) return io::load_queries(o.queries);
  return gen_task(rc.task, rc.dataset_size, derive_seed(rc.train.seed, {kTrainSetStream}));
}

std::vector<QueryRecord> test_queries(const Options& o, const io::RunConfig& rc) {
  if (!o.testset.empty()) return io::load_queries(o.testset);
  return gen_task(rc.task, rc.testset_size, derive_seed(rc.train.seed, {kTestSetStream}));
}

ToyPolicy make_policy(const Options& o, const io::RunConfig& rc, double default_scale) {
  if (!o.policy.empty()) return ToyPolicy(rc.task, io::load_policy(o.policy));
  const double scale = o.init_scale ? *o.init_scale : default_scale;
  return ToyPolicy::initial(rc.task, scale, derive_seed(rc.train.seed, {kPolicyStream}));
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------- commands

int cmd_gen_task(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const int n = o.n.value_or(rc.dataset_size);
  const auto queries = gen_task(rc.task, n, derive_seed(rc.train.seed, {kTrainSetStream}));
  const auto path = fs::path(o.common.out) / "queries.jsonl";
  io::write_queries(path, queries);
  const auto tests = gen_task(rc.task, rc.testset_size, derive_seed(rc.train.seed, {kTestSetStream}));
  io::write_queries(fs::path(o.common.out) / "testset.jsonl", tests);
  out << "wrote " << queries.size() << " queries to " << path.string() << " and " << tests.size()
      << " test queries\n";
  return 0;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const auto queries = train_queries(o, rc);
  const auto policy = make_policy(o, rc, rc.train.init_scale);
  std::vector<ResponseGroup> groups(queries.size());
  parallel_for(queries.size(), rc.train.threads, [&](std::size_t i) {
    groups[i] = sample_responses(policy, queries[i], rc.train.k, rc.train.temperature,
                                 derive_seed(rc.train.seed, {kSampleStream, i}));
  });
  const auto path = fs::path(o.common.out) / "responses.jsonl";
  io::write_responses(path, groups);
  out << "wrote " << groups.size() << " groups of K=" << rc.train.k << " to " << path.string() << "\n";
  return 0;
}

std::vector<GroupScore> score_all(const std::vector<ResponseGroup>& groups, const io::RunConfig& rc) {
  std::vector<GroupScore> scores(groups.size());
  parallel_for(groups.size(), rc.train.threads,
               [&](std::size_t i) { scores[i] = score_group(groups[i], rc.train.selection, rc.train.advantage_estimator); });
  return scores;
}

int cmd_score_offline(const Options& o, std::ostream& out) {
  if (o.responses.empty()) throw Error("--responses is required");
  const auto rc = resolve(o);
  const auto scores = score_all(io::load_responses(o.responses), rc);
  const auto path = fs::path(o.common.out) / "scores.jsonl";
  io::write_scores(path, scores);
  int undefined = 0;
  for (const auto& s : scores) undefined += !s.r_pb.has_value();
  out << "scored " << scores.size() << " groups (" << undefined << " with undefined r_pb) -> " << path.string()
      << "\n";
  return 0;
}

int cmd_select_offline(const Options& o, std::ostream& out) {
  auto rc = resolve(o);
  // Offline selection ranks by r_pb unless a metric was asked for.
  if (!o.metric && (o.common.config.empty() || !io::load_config(o.common.config).count("metric")))
    rc.train.selection.metric = SelectionMetric::r_pb_offline;
  const auto& sel = rc.train.selection;
  io::SelectionArtifact a;
  a.selector = to_string(sel.metric);
  a.seed = rc.train.seed;
  a.config = io::to_json(rc);
  a.run_id = "select-offline-" + a.selector + "-" + std::to_string(a.seed);

  if (sel.metric == SelectionMetric::k_center) {
    if (o.embeddings.empty()) throw Error("--embeddings is required for k_center");
    const auto vectors = io::load_embeddings(o.embeddings);
    for (const auto& [id, v] : vectors) a.scores.emplace(id, std::nullopt);
    a.ids = select_kcenter(vectors, sel.ratio_p);
  } else {
    if (o.responses.empty()) throw Error("--responses is required");
    const auto groups = io::load_responses(o.responses);
    const auto scores = score_all(groups, rc);
    switch (sel.metric) {
      case SelectionMetric::r_pb_offline:
        for (const auto& s : scores) a.scores.emplace(s.query_id, s.r_pb);
        a.ids = select_offline(a.scores, sel.ratio_p);
        break;
      case SelectionMetric::r_pb_online:
        for (const auto& s : scores) a.scores.emplace(s.query_id, online_rank_score(s));
        a.ids = select_online(a.scores, sel.ratio_p);
        break;
      case SelectionMetric::ppl:
      case SelectionMetric::entropy: {
        const auto kind = sel.metric == SelectionMetric::ppl ? UncertaintyKind::ppl : UncertaintyKind::entropy;
        std::map<std::string, double> mean_u;
        for (const auto& g : groups) {
          double total = 0.0;
          for (const auto& r : g.responses) total += uncertainty(r, kind, sel.entropy_direction);
          mean_u[g.query_id] = total / static_cast<double>(g.k());
        }
        for (const auto& [id, v] : mean_u) a.scores.emplace(id, v);
        a.ids = select_top_uncertainty(mean_u, sel.ratio_p);
        break;
      }
      case SelectionMetric::random: {
        std::vector<std::string> ids;
        for (const auto& g : groups) {
          ids.push_back(g.query_id);
          a.scores.emplace(g.query_id, std::nullopt);
        }
        a.ids = select_random(ids, sel.ratio_p, sel.seed);
        break;
      }
      case SelectionMetric::k_center: break;
    }
  }
  const auto path = fs::path(o.common.out) / "selection.json";
  io::persist_selection(a, path);
  out << "selected " << a.ids.size() << " of " << a.scores.size() << " queries by " << a.selector << " -> "
      << path.string() << "\n";
  return 0;
}

int cmd_train_online(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  auto dataset = train_queries(o, rc);
  if (!o.selection.empty()) {
    const auto chosen = io::load_selection(o.selection);
    const std::set<std::string> keep(chosen.ids.begin(), chosen.ids.end());
    std::erase_if(dataset, [&](const QueryRecord& q) { return !keep.count(q.id); });
    if (dataset.empty()) throw Error("selection matches no query in the dataset");
  }
  const auto testset = test_queries(o, rc);
  std::optional<VectorMap> embeddings;
  if (!o.embeddings.empty()) embeddings = io::load_embeddings(o.embeddings);

  auto config = rc.train;
  if (static_cast<std::size_t>(config.batch_size) > dataset.size())
    config.batch_size = static_cast<int>(dataset.size());
  const auto result = o.policy.empty()
                          ? train_loop(config, rc.task, dataset, testset, embeddings ? &*embeddings : nullptr)
                          : train_loop(config, make_policy(o, rc, 0.0), dataset, testset,
                                       embeddings ? &*embeddings : nullptr);

  const fs::path dir = o.common.out;
  io::write_metrics_csv(dir / "metrics.csv", result.metrics);
  io::write_selection_trace(dir / "selections.jsonl", result.metrics);
  io::save_policy(dir / "policy.bin", result.policy.params());
  json run = io::to_json(rc);
  run["batch_size"] = config.batch_size;
  io::write_text(dir / "run.json", run.dump(2) + "\n");

  const double initial = eval_accuracy(ToyPolicy::initial(rc.task, rc.train.init_scale,
                                                          derive_seed(rc.train.seed, {0})),
                                       testset);
  out << "trained " << result.metrics.size() << " steps with " << to_string(rc.train.selection.metric)
      << " selection; greedy accuracy " << fmt(initial, "%.3f") << " -> "
      << fmt(result.metrics.empty() ? initial : result.metrics.back().test_accuracy, "%.3f") << "\n";
  return 0;
}

int cmd_verify_theorem1(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const int k = o.k.value_or(8);
  const std::uint64_t seed = rc.train.seed;

  // Positive coefficient pairs drawn once from the seed.
  Rng coeff_rng(derive_seed(seed, {1}));
  std::vector<double> c(static_cast<std::size_t>(k)), d(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    c[i] = coeff_rng.uniform(0.1, 2.0);
    d[i] = coeff_rng.uniform(0.1, 2.0);
  }
  const auto log_u = UDistribution::log_uniform(1.1, 10.0);
  auto main_report = mc_theorem1(c, d, log_u, o.trials, derive_seed(seed, {2}), 0.99, o.threads);

  const std::vector<double> one{1.0};
  const auto two_point = UDistribution::discrete({2.0, 4.0});
  auto exact_report = mc_theorem1(one, one, two_point, o.trials, derive_seed(seed, {3}), 0.99, o.threads);

  const auto& ce = main_report.covariance_estimate;
  const auto& ee = exact_report.covariance_estimate;
  const double exact = theorem1_covariance(one, one, two_point);
  json summary{{"k", k},
               {"trials", o.trials},
               {"coefficients_c", c},
               {"coefficients_d", d},
               {"u_distribution", "log_uniform[1.1,10]"},
               {"closed_form_covariance", theorem1_covariance(c, d, log_u)},
               {"ci_below_zero", ce.ci_high < 0.0},
               {"two_point_exact_covariance", exact},
               {"two_point_exact_within_ci", ee.ci_low <= exact && exact <= ee.ci_high}};
  const auto path = fs::path(o.common.out) / "theorem_report.json";
  io::write_theorem_reports(path, {main_report, exact_report}, summary);
  out << "Cov(P,Q), K=" << k << ": " << fmt(ce.value) << " 99% CI [" << fmt(ce.ci_low) << ", " << fmt(ce.ci_high)
      << "]" << (ce.ci_high < 0.0 ? "  (below zero)" : "  (NOT below zero)") << "\n"
      << "two-point case: " << fmt(ee.value) << " CI [" << fmt(ee.ci_low) << ", " << fmt(ee.ci_high)
      << "], exact " << fmt(exact) << "\n";
  return 0;
}

int cmd_verify_theorem2(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const int groups = o.groups.value_or(40);
  const double eta = o.eta.value_or(1e-4);
  const double scale = o.init_scale.value_or(1.0);
  const auto trials = theorem2_campaign(rc.task, groups, o.k.value_or(8), eta, scale, rc.train.seed);

  std::vector<TheoremReport> reports;
  json rows = json::array();
  int first_order = 0, bound = 0, shrink = 0;
  for (const auto& t : trials) {
    reports.push_back(t.full);
    reports.push_back(t.half);
    const double s = t.shrink_factor();
    first_order += t.first_order_ok();
    bound += t.bound_ok();
    shrink += s >= 3.0 && s <= 5.0;
    rows.push_back({{"query_id", t.query.id},
                    {"prompt", t.query.prompt},
                    {"relative_residual", t.full.relative_residual()},
                    {"shrink_factor", s},
                    {"bound_ok", t.bound_ok()},
                    {"max_off_diagonal", t.full.max_off_diagonal()}});
  }
  const double n = static_cast<double>(trials.size());
  json summary{{"groups", trials.size()},
               {"eta", eta},
               {"init_scale", scale},
               {"first_order_pass_rate", first_order / n},
               {"bound_pass_rate", bound / n},
               {"shrink_in_range_rate", shrink / n},
               {"groups_detail", rows}};
  const auto path = fs::path(o.common.out) / "theorem_report.json";
  io::write_theorem_reports(path, reports, summary);
  out << trials.size() << " groups at eta=" << fmt(eta) << ": first-order residual < 5% in " << first_order
      << ", bound holds in " << bound << ", residual shrink in [3,5] in " << shrink << "\n";
  return 0;
}

int cmd_grad_heatmap(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const int k = o.k.value_or(8);
  const auto policy = make_policy(o, rc, o.init_scale.value_or(1.0));
  const auto query = train_queries(o, rc).front();
  const auto m = grad_orthogonality_heatmap(policy, query, k, derive_seed(rc.train.seed, {kSampleStream}));

  double off = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) off += std::abs(m[i][j]);
  off /= static_cast<double>(k * (k - 1));

  std::ostringstream csv;
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) csv << (j ? "," : "") << fmt(row[j], "%.17g");
    csv << "\n";
  }
  const fs::path dir = o.common.out;
  io::write_text(dir / "heatmap.csv", csv.str());
  io::write_text(dir / "heatmap.json",
                 json{{"query_id", query.id}, {"prompt", query.prompt}, {"k", k}, {"matrix", m},
                      {"mean_abs_off_diagonal", off}}
                         .dump(2) + "\n");
  out << "gradient inner-product heatmap for " << query.prompt << " (K=" << k
      << "): mean |off-diagonal| = " << fmt(off, "%.4f") << "\n";
  return 0;
}

int cmd_correlate(const Options& o, std::ostream& out) {
  auto rc = resolve(o);
  if (o.n) rc.dataset_size = *o.n;
  const auto dataset = train_queries(o, rc);
  const auto policy = make_policy(o, rc, o.init_scale.value_or(1.0));
  const int k = o.k.value_or(64);
  const auto r = offline_online_correlation(dataset, policy, k, rc.train.selection.gamma,
                                            derive_seed(rc.train.seed, {kSampleStream}), o.threads);
  std::ostringstream csv;
  csv << "query_id,r_pb,r_pb_online\n";
  for (std::size_t i = 0; i < r.ids.size(); ++i)
    csv << r.ids[i] << ',' << fmt(r.offline[i], "%.17g") << ',' << fmt(r.online[i], "%.17g") << "\n";
  const fs::path dir = o.common.out;
  io::write_text(dir / "correlation.csv", csv.str());
  io::write_text(dir / "correlation.json",
                 json{{"correlation", r.correlation}, {"pairs", r.ids.size()}, {"queries", dataset.size()},
                      {"k", k}, {"gamma", rc.train.selection.gamma}}
                         .dump(2) + "\n");
  out << "Pearson(r_pb, r_pb_online) over " << r.ids.size() << " queries: " << fmt(r.correlation, "%.4f") << "\n";
  return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
  const fs::path in = o.in.empty() ? fs::path(o.common.out) : fs::path(o.in);
  std::ostringstream text;
  bool any = false;
  if (fs::exists(in / "metrics.csv")) {
    any = true;
    const auto m = io::read_metrics_csv(in / "metrics.csv");
    text << "training: " << m.size() << " steps\n";
    if (!m.empty()) {
      const auto& first = m.front();
      const auto& last = m.back();
      text << "  test_accuracy        " << fmt(first.test_accuracy, "%.4f") << " -> " << fmt(last.test_accuracy, "%.4f")
           << "\n"
           << "  mean_reward          " << fmt(first.mean_reward, "%.4f") << " -> " << fmt(last.mean_reward, "%.4f")
           << "\n"
           << "  policy_entropy       " << fmt(first.policy_entropy, "%.4f") << " -> "
           << fmt(last.policy_entropy, "%.4f") << "\n"
           << "  response_length      " << fmt(first.mean_response_length, "%.4f") << " -> "
           << fmt(last.mean_response_length, "%.4f") << "\n";
      double cons = 0.0, incons = 0.0;
      for (const auto& s : m) {
        cons += s.grad_norm_consistent;
        incons += s.grad_norm_inconsistent;
      }
      text << "  mean grad norm consistent " << fmt(cons / m.size(), "%.4f") << ", inconsistent "
           << fmt(incons / m.size(), "%.4f") << "\n";
    }
  }
  if (fs::exists(in / "theorem_report.json")) {
    any = true;
    const auto doc = json::parse(io::read_text(in / "theorem_report.json"));
    std::map<std::string, int> kinds;
    for (const auto& r : doc.at("reports")) ++kinds[io::theorem_report_from_json(r).kind];
    text << "theorem reports:";
    for (const auto& [kind, count] : kinds) text << " " << kind << " x" << count;
    text << "\n";
    auto summary = doc.at("summary");
    summary.erase("groups_detail");
    text << "  summary " << summary.dump() << "\n";
  }
  if (fs::exists(in / "correlation.json")) {
    any = true;
    text << "correlation: " << json::parse(io::read_text(in / "correlation.json")).dump() << "\n";
  }
  if (fs::exists(in / "selection.json")) {
    any = true;
    const auto a = io::load_selection(in / "selection.json");
    text << "selection: " << a.selector << " kept " << a.ids.size() << " of " << a.scores.size() << " queries\n";
  }
  if (!any) throw Error("no run artifacts found in " + in.string());
  io::write_text(fs::path(o.common.out) / "report.txt", text.str());
  out << text.str();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-consistency query selection for verifiable-reward RL"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-task", "Generate a toy modular-arithmetic dataset");
  gen->add_option("--n", o.n, "Number of training queries");

  auto* sample = app.add_subcommand("sample", "Sample K responses per query from a toy policy");
  sample->add_option("--queries", o.queries)->check(CLI::ExistingFile);
  sample->add_option("--policy", o.policy)->check(CLI::ExistingFile);
  sample->add_option("--k", o.k);
  sample->add_option("--temperature", o.temperature);
  sample->add_option("--init-scale", o.init_scale);

  auto* score = app.add_subcommand("score-offline", "Score response groups with r_pb and r_pb_online");
  score->add_option("--responses", o.responses)->check(CLI::ExistingFile);
  score->add_option("--gamma", o.gamma);
  score->add_option("--uncertainty-kind", o.uncertainty_kind);
  score->add_option("--estimator", o.estimator);

  auto* select = app.add_subcommand("select-offline", "Select a fraction of queries and persist the decision");
  select->add_option("--responses", o.responses)->check(CLI::ExistingFile);
  select->add_option("--embeddings", o.embeddings)->check(CLI::ExistingFile);
  select->add_option("--metric", o.metric);
  select->add_option("--ratio", o.ratio);
  select->add_option("--gamma", o.gamma);
  select->add_option("--uncertainty-kind", o.uncertainty_kind);

  auto* train = app.add_subcommand("train-online", "Online training with per-step query selection");
  train->add_option("--queries", o.queries)->check(CLI::ExistingFile);
  train->add_option("--testset", o.testset)->check(CLI::ExistingFile);
  train->add_option("--selection", o.selection, "Restrict the dataset to a persisted selection")
      ->check(CLI::ExistingFile);
  train->add_option("--embeddings", o.embeddings)->check(CLI::ExistingFile);
  train->add_option("--policy", o.policy)->check(CLI::ExistingFile);
  train->add_option("--metric", o.metric);
  train->add_option("--ratio", o.ratio);
  train->add_option("--gamma", o.gamma);
  train->add_option("--eta", o.eta);
  train->add_option("--steps", o.steps);
  train->add_option("--threads", o.threads);

  auto* t1 = app.add_subcommand("verify-theorem1", "Monte Carlo check of the negative covariance");
  t1->add_option("--k", o.k);
  t1->add_option("--trials", o.trials)->capture_default_str();
  t1->add_option("--threads", o.threads);

  auto* t2 = app.add_subcommand("verify-theorem2", "First-order and bound checks of one gradient step");
  t2->add_option("--groups", o.groups);
  t2->add_option("--k", o.k);
  t2->add_option("--eta", o.eta);
  t2->add_option("--init-scale", o.init_scale);

  auto* heat = app.add_subcommand("grad-heatmap", "Normalized inner products of per-response gradients");
  heat->add_option("--k", o.k);
  heat->add_option("--queries", o.queries)->check(CLI::ExistingFile);
  heat->add_option("--policy", o.policy)->check(CLI::ExistingFile);
  heat->add_option("--init-scale", o.init_scale);

  auto* corr = app.add_subcommand("correlate", "Correlation between offline and online consistency");
  corr->add_option("--n", o.n);
  corr->add_option("--k", o.k);
  corr->add_option("--gamma", o.gamma);
  corr->add_option("--queries", o.queries)->check(CLI::ExistingFile);
  corr->add_option("--policy", o.policy)->check(CLI::ExistingFile);
  corr->add_option("--init-scale", o.init_scale);
  corr->add_option("--threads", o.threads);

  auto* report = app.add_subcommand("report", "Summarize run artifacts in a directory");
  report->add_option("--in", o.in, "Directory holding run artifacts (default: --out)");

  for (auto* sub : {gen, sample, score, select, train, t1, t2, heat, corr, report}) add_common(sub, o.common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) return cmd_gen_task(o, out);
    if (*sample) return cmd_sample(o, out);
    if (*score) return cmd_score_offline(o, out);
    if (*select) return cmd_select_offline(o, out);
    if (*train) return cmd_train_online(o, out);
    if (*t1) return cmd_verify_theorem1(o, out);
    if (*t2) return cmd_verify_theorem2(o, out);
    if (*heat) return cmd_grad_heatmap(o, out);
    if (*corr) return cmd_correlate(o, out);
    if (*report) return cmd_report(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace consel::cli
