#include "consel/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "consel/toy_task.hpp"

namespace consel::io {

using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out | std::ios::trunc) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

std::string line_error(const fs::path& path, std::size_t line, const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

/// Calls fn(json, line_number) for every non-blank line.
template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  auto in = open_in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(line_error(path, n, std::string("malformed JSON: ") + e.what()));
    }
    try {
      fn(j, n);
    } catch (const json::exception& e) {
      throw Error(line_error(path, n, e.what()));
    } catch (const Error& e) {
      throw Error(line_error(path, n, e.what()));
    }
  }
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TokenId token_from_json(const json& t) {
  if (t.is_number_integer()) {
    const auto v = t.get<std::int64_t>();
    if (v < 0 || v >= vocab::kSize) throw Error("token id out of range: " + std::to_string(v));
    return static_cast<TokenId>(v);
  }
  if (t.is_string()) {
    const auto s = t.get<std::string>();
    if (s == "<eos>") return vocab::kEos;
    if (s.size() != 1) throw Error("token string must be a single symbol: " + s);
    return vocab::token(s[0]);
  }
  throw Error("token must be an integer or a string");
}

}  // namespace

std::vector<QueryRecord> load_queries(const fs::path& path) {
  std::vector<QueryRecord> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    for (const char* key : {"id", "prompt", "answer"})
      if (!j.contains(key) || !j.at(key).is_string()) throw Error(std::string("missing string field \"") + key + "\"");
    QueryRecord q{j.at("id").get<std::string>(), j.at("prompt").get<std::string>(), j.at("answer").get<std::string>()};
    if (q.answer.empty()) throw Error("empty answer for " + q.id);
    if (!ids.insert(q.id).second) throw Error("duplicate id \"" + q.id + "\"");
    out.push_back(std::move(q));
  });
  return out;
}

void write_queries(const fs::path& path, const std::vector<QueryRecord>& queries) {
  auto out = open_out(path);
  for (const auto& q : queries) out << json{{"id", q.id}, {"prompt", q.prompt}, {"answer", q.answer}}.dump() << '\n';
  finish(out, path);
}

std::vector<ResponseGroup> load_responses(const fs::path& path) {
  std::vector<ResponseGroup> groups;
  std::map<std::string, std::size_t> index;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    ResponseRecord r;
    r.query_id = j.at("query_id").get<std::string>();
    r.sample_index = j.at("sample_idx").get<int>();
    for (const auto& t : j.at("tokens")) r.tokens.push_back(token_from_json(t));
    r.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
    if (j.contains("token_entropies")) r.token_entropies = j.at("token_entropies").get<std::vector<double>>();
    if (j.contains("token_margins")) r.token_margins = j.at("token_margins").get<std::vector<double>>();
    r.reward = j.at("reward").get<int>();
    validate(r);
    auto [it, fresh] = index.emplace(r.query_id, groups.size());
    if (fresh) groups.push_back({r.query_id, {}});
    groups[it->second].responses.push_back(std::move(r));
  });
  for (auto& g : groups) {
    std::stable_sort(g.responses.begin(), g.responses.end(),
                     [](const ResponseRecord& a, const ResponseRecord& b) { return a.sample_index < b.sample_index; });
    for (std::size_t i = 1; i < g.responses.size(); ++i)
      if (g.responses[i].sample_index == g.responses[i - 1].sample_index)
        throw Error("duplicate sample_idx for " + g.query_id);
    if (g.responses.size() < 2) throw Error("group too small: " + g.query_id);
  }
  return groups;
}

void write_responses(const fs::path& path, const std::vector<ResponseGroup>& groups) {
  auto out = open_out(path);
  for (const auto& g : groups)
    for (const auto& r : g.responses) {
      json j{{"query_id", r.query_id},
             {"sample_idx", r.sample_index},
             {"tokens", r.tokens},
             {"token_logprobs", r.token_logprobs},
             {"reward", r.reward}};
      if (r.has_entropies()) j["token_entropies"] = r.token_entropies;
      if (r.has_margins()) j["token_margins"] = r.token_margins;
      out << j.dump() << '\n';
    }
  finish(out, path);
}

VectorMap load_embeddings(const fs::path& path) {
  VectorMap out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    auto id = j.at("id").get<std::string>();
    auto v = j.at("vector").get<std::vector<double>>();
    if (!out.emplace(id, std::move(v)).second) throw Error("duplicate id \"" + id + "\"");
  });
  return out;
}

void write_scores(const fs::path& path, const std::vector<GroupScore>& scores) {
  auto out = open_out(path);
  for (const auto& s : scores) {
    json j{{"query_id", s.query_id}, {"uncertainties", s.uncertainties}, {"advantages", s.advantages},
           {"k0", s.k0},           {"k1", s.k1}};
    j["r_pb"] = s.r_pb ? json(*s.r_pb) : json(nullptr);
    j["r_pb_online"] = s.r_pb_online ? json(*s.r_pb_online) : json(nullptr);
    out << j.dump() << '\n';
  }
  finish(out, path);
}

namespace {

json selection_body(const SelectionArtifact& a) {
  json scores = json::object();
  for (const auto& [id, s] : a.scores) scores[id] = s ? json(*s) : json(nullptr);
  return json{{"run_id", a.run_id}, {"selector", a.selector}, {"config", a.config},
              {"seed", a.seed},     {"ids", a.ids},           {"scores", scores}};
}

}  // namespace

std::string content_hash(const SelectionArtifact& artifact) {
  const std::string canonical = selection_body(artifact).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

json to_json(const SelectionArtifact& artifact) {
  json j = selection_body(artifact);
  j["content_hash"] = content_hash(artifact);
  return j;
}

void persist_selection(const SelectionArtifact& artifact, const fs::path& path) {
  for (const auto& id : artifact.ids)
    if (!artifact.scores.count(id)) throw Error("selected id \"" + id + "\" has no score");
  auto out = open_out(path);
  out << to_json(artifact).dump(2) << '\n';
  finish(out, path);
}

SelectionArtifact load_selection(const fs::path& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed JSON: " + e.what());
  }
  SelectionArtifact a;
  try {
    a.run_id = j.at("run_id").get<std::string>();
    a.selector = j.at("selector").get<std::string>();
    a.config = j.at("config");
    a.seed = j.at("seed").get<std::uint64_t>();
    a.ids = j.at("ids").get<std::vector<std::string>>();
    for (const auto& [id, s] : j.at("scores").items())
      a.scores.emplace(id, s.is_null() ? std::nullopt : std::optional<double>(s.get<double>()));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (j.value("content_hash", std::string()) != content_hash(a))
    throw Error(path.string() + ": content hash mismatch");
  return a;
}

void write_metrics_csv(const fs::path& path, const std::vector<StepMetrics>& metrics) {
  auto out = open_out(path);
  out << kMetricsHeader << '\n';
  for (const auto& m : metrics) {
    out << m.step << ',' << fmt_double(m.mean_reward) << ',' << fmt_double(m.test_accuracy) << ','
        << fmt_double(m.policy_entropy) << ',' << fmt_double(m.mean_response_length) << ','
        << fmt_double(m.mean_grad_norm) << ',' << fmt_double(m.grad_norm_consistent) << ','
        << fmt_double(m.grad_norm_inconsistent) << '\n';
  }
  finish(out, path);
}

std::vector<StepMetrics> read_metrics_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw Error(path.string() + ": unexpected metrics header");
  std::vector<StepMetrics> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw Error(line_error(path, n, "expected 8 columns"));
    try {
      StepMetrics m;
      m.step = std::stoi(cells[0]);
      m.mean_reward = std::stod(cells[1]);
      m.test_accuracy = std::stod(cells[2]);
      m.policy_entropy = std::stod(cells[3]);
      m.mean_response_length = std::stod(cells[4]);
      m.mean_grad_norm = std::stod(cells[5]);
      m.grad_norm_consistent = std::stod(cells[6]);
      m.grad_norm_inconsistent = std::stod(cells[7]);
      out.push_back(std::move(m));
    } catch (const std::logic_error&) {
      throw Error(line_error(path, n, "bad number"));
    }
  }
  return out;
}

void write_selection_trace(const fs::path& path, const std::vector<StepMetrics>& metrics) {
  auto out = open_out(path);
  for (const auto& m : metrics) out << json{{"step", m.step}, {"selected_ids", m.selected_ids}}.dump() << '\n';
  finish(out, path);
}

json to_json(const TheoremReport& r) {
  return json{{"kind", r.kind},
              {"eta", r.eta},
              {"delta_u_measured", r.delta_u_measured},
              {"delta_u_first_order", r.delta_u_first_order},
              {"bound_rhs", r.bound_rhs},
              {"gamma", r.gamma},
              {"r_pb_online", r.r_pb_online},
              {"m", r.m},
              {"M", r.big_m},
              {"orthogonality_matrix", r.orthogonality_matrix},
              {"covariance_estimate",
               {{"value", r.covariance_estimate.value},
                {"ci_low", r.covariance_estimate.ci_low},
                {"ci_high", r.covariance_estimate.ci_high},
                {"confidence", r.covariance_estimate.confidence},
                {"trials", r.covariance_estimate.trials}}}};
}

TheoremReport theorem_report_from_json(const json& j) {
  TheoremReport r;
  r.kind = j.at("kind").get<std::string>();
  r.eta = j.at("eta").get<double>();
  r.delta_u_measured = j.at("delta_u_measured").get<double>();
  r.delta_u_first_order = j.at("delta_u_first_order").get<double>();
  r.bound_rhs = j.at("bound_rhs").get<double>();
  r.gamma = j.at("gamma").get<double>();
  r.r_pb_online = j.at("r_pb_online").get<double>();
  r.m = j.at("m").get<double>();
  r.big_m = j.at("M").get<double>();
  r.orthogonality_matrix = j.at("orthogonality_matrix").get<std::vector<std::vector<double>>>();
  const auto& c = j.at("covariance_estimate");
  r.covariance_estimate.value = c.at("value").get<double>();
  r.covariance_estimate.ci_low = c.at("ci_low").get<double>();
  r.covariance_estimate.ci_high = c.at("ci_high").get<double>();
  r.covariance_estimate.confidence = c.at("confidence").get<double>();
  r.covariance_estimate.trials = c.at("trials").get<std::size_t>();
  return r;
}

void write_theorem_reports(const fs::path& path, const std::vector<TheoremReport>& reports, const json& summary) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  auto out = open_out(path);
  out << json{{"reports", arr}, {"summary", summary}}.dump(2) << '\n';
  finish(out, path);
}

namespace {

constexpr char kPolicyMagic[8] = {'C', 'O', 'N', 'S', 'E', 'L', 'P', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "policy files are little-endian");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const fs::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(path.string() + ": truncated policy file");
  return v;
}

}  // namespace

void save_policy(const fs::path& path, const PolicyParams& params) {
  validate(params);
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  out.write(kPolicyMagic, sizeof kPolicyMagic);
  put<std::int32_t>(out, params.shape.vocab);
  put<std::int32_t>(out, params.shape.context_length);
  put<std::int32_t>(out, params.shape.hidden_width);
  put<std::uint64_t>(out, params.theta.size());
  for (double v : params.theta) put<double>(out, v);
  finish(out, path);
}

PolicyParams load_policy(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[sizeof kPolicyMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kPolicyMagic, sizeof magic) != 0)
    throw Error(path.string() + ": not a policy file");
  PolicyParams p;
  p.shape.vocab = get<std::int32_t>(in, path);
  p.shape.context_length = get<std::int32_t>(in, path);
  p.shape.hidden_width = get<std::int32_t>(in, path);
  const auto n = get<std::uint64_t>(in, path);
  if (n != p.shape.size()) throw Error(path.string() + ": shape header does not match parameter count");
  p.theta.resize(n);
  for (auto& v : p.theta) v = get<double>(in, path);
  validate(p);
  return p;
}

std::map<std::string, std::string> load_config(const fs::path& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(line_error(path, n, "expected key = value"));
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(line_error(path, n, "empty key"));
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    try {
      auto& t = c.train;
      auto& s = c.train.selection;
      if (key == "eta") t.eta = std::stod(value);
      else if (key == "k") t.k = std::stoi(value);
      else if (key == "g") t.g = std::stoi(value);
      else if (key == "batch_size") t.batch_size = std::stoi(value);
      else if (key == "steps") t.steps = std::stoi(value);
      else if (key == "temperature") t.temperature = std::stod(value);
      else if (key == "kl_coeff") t.kl_coeff = std::stod(value);
      else if (key == "advantage_estimator") t.advantage_estimator = parse_advantage_estimator(value);
      else if (key == "seed") t.seed = s.seed = std::stoull(value);
      else if (key == "init_scale") t.init_scale = std::stod(value);
      else if (key == "threads") t.threads = std::stoi(value);
      else if (key == "ratio_p") s.ratio_p = std::stod(value);
      else if (key == "metric") s.metric = parse_selection_metric(value);
      else if (key == "gamma") s.gamma = std::stod(value);
      else if (key == "uncertainty_kind") s.uncertainty_kind = parse_uncertainty_kind(value);
      else if (key == "entropy_direction") s.entropy_direction = parse_entropy_direction(value);
      else if (key == "modulus") c.task.modulus = std::stoi(value);
      else if (key == "operand_min") c.task.operand_min = std::stoi(value);
      else if (key == "operand_max") c.task.operand_max = std::stoi(value);
      else if (key == "answer_length") c.task.answer_length = std::stoi(value);
      else if (key == "operators") c.task.operators = value;
      else if (key == "dataset_size") c.dataset_size = std::stoi(value);
      else if (key == "testset_size") c.testset_size = std::stoi(value);
      else throw Error("unknown config key: " + key);
    } catch (const std::logic_error&) {
      throw Error("bad value for " + key + ": " + value);
    }
  }
}

json to_json(const RunConfig& c) {
  const auto& t = c.train;
  const auto& s = t.selection;
  return json{{"eta", t.eta},
              {"k", t.k},
              {"g", t.g},
              {"batch_size", t.batch_size},
              {"steps", t.steps},
              {"temperature", t.temperature},
              {"kl_coeff", t.kl_coeff},
              {"advantage_estimator", to_string(t.advantage_estimator)},
              {"seed", t.seed},
              {"init_scale", t.init_scale},
              {"ratio_p", s.ratio_p},
              {"metric", to_string(s.metric)},
              {"gamma", s.gamma},
              {"uncertainty_kind", to_string(s.uncertainty_kind)},
              {"entropy_direction", to_string(s.entropy_direction)},
              {"modulus", c.task.modulus},
              {"operand_min", c.task.operand_min},
              {"operand_max", c.task.operand_max},
              {"answer_length", c.task.answer_length},
              {"operators", c.task.operators},
              {"dataset_size", c.dataset_size},
              {"testset_size", c.testset_size}};
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace consel::io
