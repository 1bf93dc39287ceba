#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"
#include "manifest.hpp"

namespace parmine::cli {

/// Per-invocation state shared by the stages of one run.
struct RunContext {
  std::size_t threads = 0;  // 0 = hardware concurrency
  Manifest manifest;
  std::ostream* log = nullptr;
};

// File names of the intermediate artifacts inside the output directory.
namespace artifact {
inline constexpr const char* kSrcWindows = "windows.src.tsv";
inline constexpr const char* kTgtWindows = "windows.tgt.tsv";
inline constexpr const char* kSrcVectors = "windows.src.mvec";
inline constexpr const char* kTgtVectors = "windows.tgt.mvec";
inline constexpr const char* kPairs = "pairs.tsv";
inline constexpr const char* kClusters = "clusters.jsonl";
inline constexpr const char* kAligned = "aligned.jsonl";
inline constexpr const char* kDatasetTsv = "dataset.tsv";
inline constexpr const char* kDatasetJsonl = "dataset.jsonl";
inline constexpr const char* kEvalReport = "eval_report.tsv";
inline constexpr const char* kAuditSheet = "audit.tsv";
inline constexpr const char* kAuditRates = "audit_rates.tsv";
inline constexpr const char* kStats = "stats.tsv";
inline constexpr const char* kDatasetStats = "dataset_stats.tsv";
}  // namespace artifact

void stage_ingest(const PipelineConfig& cfg, RunContext& ctx);
void stage_windows(const PipelineConfig& cfg, RunContext& ctx);
void stage_embed(const PipelineConfig& cfg, RunContext& ctx);
void stage_mine(const PipelineConfig& cfg, RunContext& ctx);
void stage_cluster(const PipelineConfig& cfg, RunContext& ctx);
void stage_align(const PipelineConfig& cfg, RunContext& ctx);
void stage_export(const PipelineConfig& cfg, RunContext& ctx);
/// windows -> embed -> mine -> cluster -> align -> export
void stage_mine_all(const PipelineConfig& cfg, RunContext& ctx);
void stage_eval(const PipelineConfig& cfg, RunContext& ctx);
void stage_audit_sample(const PipelineConfig& cfg, RunContext& ctx,
                        const std::optional<std::filesystem::path>& dataset);
void stage_audit_report(const PipelineConfig& cfg, RunContext& ctx,
                        const std::optional<std::filesystem::path>& labels);
void stage_stats(const PipelineConfig& cfg, RunContext& ctx,
                 const std::optional<std::filesystem::path>& dataset);

}  // namespace parmine::cli
