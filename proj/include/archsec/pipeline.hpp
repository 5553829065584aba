#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archsec/kb.hpp"
#include "archsec/mapping.hpp"
#include "archsec/model.hpp"
#include "archsec/report.hpp"
#include "archsec/retrieval.hpp"
#include "archsec/vuln.hpp"

namespace archsec {

struct PipelineConfig {
  std::filesystem::path model_path;
  std::filesystem::path feeds_dir;
  std::optional<YearRange> years;
  std::filesystem::path kb_dir;
  std::string method = "tfidf";  // "tfidf" or "external:<score file>"
  size_t top_k = 10;
  size_t top_m = 10;
};

struct PipelineResult {
  SysmlParseResult model;
  KnowledgeBase kb;
  VulnStore store;
  ScanResult scan;
  std::vector<TechniquePrediction> predictions;
  std::map<std::string, std::vector<ScoredControl>> controls;
  std::vector<TraceRecord> traces;
  std::vector<std::string> notes;  // skipped CVEs and similar non-fatal events
};

std::string read_file(const std::filesystem::path& path);

/// Ingests every *.json file in a directory, in lexicographic path order.
std::vector<IngestStats> load_feed_dir(VulnStore& store, const std::filesystem::path& dir,
                                       const std::optional<YearRange>& years);

/// Unique scanned CVEs, ascending id.
std::vector<const CveRecord*> scanned_records(const ScanResult& scan, const VulnStore& store);

/// (cve_id, cleaned description) corpus docs for the CVE->technique
/// vectorizer: the descriptions of the scan-matched records.
std::vector<std::pair<std::string, std::string>> nvd_sample_docs(
    const std::vector<const CveRecord*>& records);

/// Technique predictions for the scanned CVEs, via TF-IDF or an external
/// score file. CVEs whose description cleans to nothing are skipped with a
/// note.
std::vector<TechniquePrediction> predict_techniques(
    const PipelineConfig& config, const KnowledgeBase& kb, const ComponentRegistry& registry,
    const std::vector<const CveRecord*>& records, std::vector<std::string>& notes);

/// Control recommendations for every technique that appears in a prediction.
std::map<std::string, std::vector<ScoredControl>> recommend_for_predictions(
    const KnowledgeBase& kb, const ComponentRegistry& registry,
    const std::vector<TechniquePrediction>& predictions, size_t top_k);

/// End to end: parse, ingest, scan, map, recommend, assemble.
PipelineResult run_pipeline(const PipelineConfig& config);

nlohmann::ordered_json scan_to_json(const ScanResult& scan, const ComponentRegistry& registry);
nlohmann::ordered_json predictions_to_json(const std::vector<TechniquePrediction>& predictions);
std::vector<TechniquePrediction> predictions_from_json(const nlohmann::json& doc);
nlohmann::ordered_json controls_to_json(
    const std::map<std::string, std::vector<ScoredControl>>& controls);
std::map<std::string, std::vector<ScoredControl>> controls_from_json(const nlohmann::json& doc);

}  // namespace archsec
