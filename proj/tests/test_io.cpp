#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "consel/consistency.hpp"
#include "consel/io.hpp"
#include "consel/policy.hpp"
#include "tempdir.hpp"

using namespace consel;
namespace fs = std::filesystem;

namespace {

using testing::TempDir;

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("queries round trip and errors") {
  TempDir dir;
  const std::vector<QueryRecord> qs = {{"q1", "3+4=", "7"}, {"q2", "1+1=", "2"}};
  io::write_queries(dir / "q.jsonl", qs);
  CHECK(io::load_queries(dir / "q.jsonl") == qs);

  write(dir / "dup.jsonl", "{\"id\":\"q1\",\"prompt\":\"a\",\"answer\":\"1\"}\n{\"id\":\"q1\",\"prompt\":\"b\",\"answer\":\"2\"}\n");
  CHECK_THROWS_WITH_AS(io::load_queries(dir / "dup.jsonl"), doctest::Contains("duplicate id \"q1\""), Error);

  write(dir / "miss.jsonl", "{\"id\":\"q1\",\"prompt\":\"a\",\"answer\":\"1\"}\n{\"id\":\"q2\",\"answer\":\"2\"}\n");
  CHECK_THROWS_WITH_AS(io::load_queries(dir / "miss.jsonl"), doctest::Contains("miss.jsonl:2:"), Error);
  CHECK_THROWS_AS(io::load_queries(dir / "absent.jsonl"), Error);
}

TEST_CASE("responses load from mixed token spellings") {
  TempDir dir;
  write(dir / "r.jsonl",
        "{\"query_id\":\"q1\",\"sample_idx\":1,\"tokens\":[\"7\",\"$\"],\"token_logprobs\":[-0.1,-0.2],\"reward\":1}\n"
        "{\"query_id\":\"q1\",\"sample_idx\":0,\"tokens\":[3,14],\"token_logprobs\":[-1.0,-0.5],\"reward\":0,"
        "\"token_entropies\":[0.5,0.2],\"token_margins\":[0.1,0.6]}\n");
  const auto gs = io::load_responses(dir / "r.jsonl");
  REQUIRE(gs.size() == 1);
  REQUIRE(gs[0].k() == 2);
  CHECK(gs[0].responses[0].sample_index == 0);
  CHECK(gs[0].responses[1].tokens == std::vector<TokenId>{7, 14});
  CHECK(gs[0].responses[0].has_entropies());
  CHECK_FALSE(gs[0].responses[1].has_margins());

  io::write_responses(dir / "out.jsonl", gs);
  CHECK(io::load_responses(dir / "out.jsonl") == gs);

  write(dir / "small.jsonl",
        "{\"query_id\":\"q9\",\"sample_idx\":0,\"tokens\":[1],\"token_logprobs\":[-0.1],\"reward\":1}\n");
  CHECK_THROWS_WITH_AS(io::load_responses(dir / "small.jsonl"), doctest::Contains("group too small: q9"), Error);

  write(dir / "bad.jsonl",
        "{\"query_id\":\"q1\",\"sample_idx\":0,\"tokens\":[1],\"token_logprobs\":[0.5],\"reward\":1}\n"
        "{\"query_id\":\"q1\",\"sample_idx\":1,\"tokens\":[1],\"token_logprobs\":[-0.5],\"reward\":0}\n");
  CHECK_THROWS_WITH_AS(io::load_responses(dir / "bad.jsonl"), doctest::Contains("invalid logprob"), Error);

  write(dir / "empty.jsonl",
        "{\"query_id\":\"q1\",\"sample_idx\":0,\"tokens\":[],\"token_logprobs\":[],\"reward\":1}\n"
        "{\"query_id\":\"q1\",\"sample_idx\":1,\"tokens\":[1],\"token_logprobs\":[-0.5],\"reward\":0}\n");
  CHECK_THROWS_WITH_AS(io::load_responses(dir / "empty.jsonl"), doctest::Contains("empty response"), Error);
}

TEST_CASE("selection artifact round trip") {
  TempDir dir;
  io::SelectionArtifact a;
  a.run_id = "run-1";
  a.selector = "r_pb_offline";
  a.config = {{"ratio_p", 0.5}};
  a.seed = 42;
  a.ids = {"q2", "q1"};
  a.scores = {{"q1", -0.25}, {"q2", -0.5}, {"q3", std::nullopt}};
  io::persist_selection(a, dir / "s.json");
  CHECK(io::load_selection(dir / "s.json") == a);

  io::persist_selection(a, dir / "s2.json");
  CHECK(io::read_text(dir / "s.json") == io::read_text(dir / "s2.json"));

  auto tampered = io::read_text(dir / "s.json");
  tampered.replace(tampered.find("run-1"), 5, "run-2");
  io::write_text(dir / "t.json", tampered);
  CHECK_THROWS_AS(io::load_selection(dir / "t.json"), Error);

  a.ids.push_back("q7");
  CHECK_THROWS_AS(io::persist_selection(a, dir / "bad.json"), Error);
}

TEST_CASE("metrics csv round trip") {
  TempDir dir;
  std::vector<StepMetrics> ms(2);
  ms[0] = {0, 0.25, 0.1, 2.7, 1.0, 0.03125, 0.1 / 3.0, 0.0, {"q1"}};
  ms[1] = {1, 0.5, 0.2, 2.5, 1.5, 1e-17, 0.7, 0.2, {"q2"}};
  io::write_metrics_csv(dir / "m.csv", ms);
  CHECK(io::read_text(dir / "m.csv").rfind(io::kMetricsHeader, 0) == 0);
  auto back = io::read_metrics_csv(dir / "m.csv");
  for (auto& m : ms) m.selected_ids.clear();
  CHECK(back == ms);
}

TEST_CASE("policy and theorem report round trips") {
  TempDir dir;
  ToyTaskSpec s;
  const auto pol = ToyPolicy::initial(s, 0.9, 4);
  io::save_policy(dir / "p.bin", pol.params());
  CHECK(io::load_policy(dir / "p.bin") == pol.params());
  io::write_text(dir / "junk.bin", "NOTAPOLICY");
  CHECK_THROWS_AS(io::load_policy(dir / "junk.bin"), Error);

  TheoremReport r;
  r.kind = "theorem2";
  r.eta = 1e-4;
  r.delta_u_measured = -1.25e-3;
  r.delta_u_first_order = -1.2500001e-3;
  r.big_m = 3.5;
  r.m = 0.5;
  r.orthogonality_matrix = {{1.0, 0.1}, {0.1, 1.0}};
  const auto back = io::theorem_report_from_json(io::to_json(r));
  CHECK(back.kind == r.kind);
  CHECK(back.big_m == r.big_m);
  CHECK(back.delta_u_first_order == r.delta_u_first_order);
  CHECK(back.orthogonality_matrix == r.orthogonality_matrix);
  CHECK(io::to_json(r).contains("M"));
}

TEST_CASE("config files") {
  TempDir dir;
  write(dir / "c.conf", "# run\neta = 2.5\nk=4\nmetric = random # trailing\nmodulus = 20\nanswer_length = 2\n");
  io::RunConfig rc;
  io::apply_config(rc, io::load_config(dir / "c.conf"));
  CHECK(rc.train.eta == 2.5);
  CHECK(rc.train.k == 4);
  CHECK(rc.train.selection.metric == SelectionMetric::random);
  CHECK(rc.task.modulus == 20);
  CHECK_THROWS_AS(io::apply_config(rc, {{"bogus", "1"}}), Error);
}

TEST_CASE("scores file") {
  TempDir dir;
  ResponseGroup g;
  g.query_id = "q1";
  for (int i = 0; i < 3; ++i) g.responses.push_back({"q1", i, {1}, {-0.5 * (i + 1)}, {}, {}, i % 2});
  io::write_scores(dir / "s.jsonl", {score_group(g, SelectionConfig{})});
  const auto text = io::read_text(dir / "s.jsonl");
  CHECK(text.find("\"q1\"") != std::string::npos);
  CHECK(text.find("r_pb") != std::string::npos);
}
