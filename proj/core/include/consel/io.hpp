#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "consel/policy.hpp"
#include "consel/selection.hpp"
#include "consel/trainer.hpp"
#include "consel/types.hpp"
#include "consel/verify.hpp"

namespace consel::io {

namespace fs = std::filesystem;

// Row-oriented inputs (JSON lines). Loaders are all-or-nothing: any bad line
// throws before anything is returned.

/// {"id", "prompt", "answer"} per line; duplicate ids rejected.
std::vector<QueryRecord> load_queries(const fs::path& path);
void write_queries(const fs::path& path, const std::vector<QueryRecord>& queries);

/// {"query_id", "sample_idx", "tokens", "token_logprobs", "reward",
///  optional "token_entropies", "token_margins"} per line. Tokens may be
/// integers or single-character strings from the toy vocabulary. Rows are
/// grouped by query_id in order of first appearance, then by sample_idx.
std::vector<ResponseGroup> load_responses(const fs::path& path);
void write_responses(const fs::path& path, const std::vector<ResponseGroup>& groups);

/// {"id", "vector": [reals]} per line.
VectorMap load_embeddings(const fs::path& path);

void write_scores(const fs::path& path, const std::vector<GroupScore>& scores);

/// Persisted selection decision.
struct SelectionArtifact {
  std::string run_id;
  std::string selector;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> ids;
  ScoreMap scores;

  bool operator==(const SelectionArtifact&) const = default;
};

/// Hex SHA-256 of the artifact's canonical JSON without the hash field.
std::string content_hash(const SelectionArtifact& artifact);
nlohmann::json to_json(const SelectionArtifact& artifact);
/// Writes a byte-stable document. Throws if an id has no score entry.
void persist_selection(const SelectionArtifact& artifact, const fs::path& path);
/// Verifies the embedded hash.
SelectionArtifact load_selection(const fs::path& path);

inline constexpr const char* kMetricsHeader =
    "step,mean_reward,test_accuracy,policy_entropy,mean_response_length,mean_grad_norm,"
    "grad_norm_consistent,grad_norm_inconsistent";

void write_metrics_csv(const fs::path& path, const std::vector<StepMetrics>& metrics);
/// Inverse of write_metrics_csv (selected_ids are not part of the CSV).
std::vector<StepMetrics> read_metrics_csv(const fs::path& path);
/// Selected ids per step, one JSON line per step.
void write_selection_trace(const fs::path& path, const std::vector<StepMetrics>& metrics);

nlohmann::json to_json(const TheoremReport& report);
TheoremReport theorem_report_from_json(const nlohmann::json& j);
/// Single document: {"reports": [...], "summary": {...}}.
void write_theorem_reports(const fs::path& path, const std::vector<TheoremReport>& reports,
                           const nlohmann::json& summary = nlohmann::json::object());

/// Flat little-endian binary: magic, shape header, parameter count, doubles.
void save_policy(const fs::path& path, const PolicyParams& params);
PolicyParams load_policy(const fs::path& path);

/// Flat "key = value" document; '#' starts a comment.
std::map<std::string, std::string> load_config(const fs::path& path);

/// Run-wide settings assembled from a config file and CLI flags.
struct RunConfig {
  TrainConfig train;
  ToyTaskSpec task;
  int dataset_size = 200;
  int testset_size = 200;
};

/// Applies recognised keys; unknown keys are an error.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& kv);
nlohmann::json to_json(const RunConfig& config);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace consel::io
