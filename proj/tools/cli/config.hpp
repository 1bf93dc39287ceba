#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parmine/alignment.hpp"
#include "parmine/clustering.hpp"
#include "parmine/embedding.hpp"
#include "parmine/knn.hpp"
#include "parmine/retrieval.hpp"
#include "parmine/windowing.hpp"

namespace parmine::cli {

struct TaskSpec {
  std::string name;
  TaskType type = TaskType::CrosslingualParallel;
  std::filesystem::path path;
};

struct EvalConfig {
  std::size_t pool_total = 400412;
  std::map<std::string, double> weights;
  std::uint64_t seed = 0;
  std::vector<TaskSpec> tasks;
  std::vector<std::string> strategies;
  Bm25Params bm25;
};

struct AuditConfig {
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::string annotator;
};

struct PipelineConfig {
  std::map<std::string, std::filesystem::path> corpora;  // lang -> JSONL path
  std::filesystem::path output_dir;
  ProviderConfig provider;
  WindowParams windowing;
  std::string source_lang;
  std::string target_lang;
  MiningParams mining;
  ClusterParams clustering;
  AlignParams align;
  std::size_t ma_window = 3;
  double ma_threshold = 0.5;
  WindowSource align_text = WindowSource::Original;
  RatioPolicy ratio;
  EvalConfig eval;
  AuditConfig audit;

  /// Fully resolved configuration (defaults filled in), as recorded in manifests.
  nlohmann::json snapshot;
};

/// Default values for every configuration field.
const nlohmann::json& default_config();

/// Sets `path` ("a.b.c") in `doc` to `value`. `value` is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& dotted_path, const std::string& value);

/// Merges `user` over the defaults, checks types and ranges, and resolves
/// relative paths against `base_dir`. Throws ConfigError.
PipelineConfig build_config(const nlohmann::json& user, const std::filesystem::path& base_dir);

/// Reads the JSON config file and applies overrides. Throws ConfigError
/// ("config not found: <path>") when the file is missing.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace parmine::cli
