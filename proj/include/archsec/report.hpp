#pragma once

#include <nlohmann/json.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/kb.hpp"
#include "archsec/mapping.hpp"
#include "archsec/model.hpp"
#include "archsec/vuln.hpp"

namespace archsec {

struct DanglingReference : std::runtime_error {
  explicit DanglingReference(const std::string& what)
      : std::runtime_error("dangling reference: " + what) {}
};

struct EmptyValues : std::runtime_error {
  EmptyValues() : std::runtime_error("histogram input is empty") {}
};

/// One fully resolved pipeline edge:
/// component -> CPE -> CVE -> technique -> control.
struct TraceRecord {
  std::string component;
  std::string cpe;
  std::string cve_id;
  std::optional<double> cvss;  // the CVE's own base score
  std::string technique_id;
  double technique_score = 0.0;
  std::string control_id;
  double crosswalk_score = 0.0;
  double tfidf_score = 0.0;
  double hybrid_score = 0.0;
  double priority = 0.0;  // hybrid * max cvss over the (component, technique) group
  std::string method;

  bool operator==(const TraceRecord&) const = default;
};

struct TraceLimits {
  size_t top_k_techniques = 10;
  size_t top_m_controls = 10;
};

struct TraceInputs {
  const ComponentRegistry& registry;
  const ScanResult& scan;
  const VulnStore& store;
  const std::vector<TechniquePrediction>& predictions;  // one per CVE
  const std::map<std::string, std::vector<ScoredControl>>& controls;  // per technique
  const KnowledgeBase& kb;
};

/// Expands the pipeline stages along actual links only and sorts globally by
/// priority descending, then component/cve/technique/control ids ascending.
/// Any id that fails to resolve throws DanglingReference.
std::vector<TraceRecord> assemble_traces(const TraceInputs& inputs,
                                         const TraceLimits& limits = {});

enum class ReportFormat { Json, Markdown };

/// Byte-deterministic rendering. JSON is the canonical machine form with a
/// stable key order; Markdown renders per-component sections with a
/// priority-sorted control table and a badge for components whose priority
/// used the 0.0 missing-CVSS default.
std::string emit_report(const std::vector<TraceRecord>& traces, ReportFormat format);

nlohmann::ordered_json traces_to_json(const std::vector<TraceRecord>& traces);
std::vector<TraceRecord> traces_from_json(const nlohmann::json& doc);

struct HistogramSpec {
  double clip_percentile = 99.0;  // in (0, 100]
  size_t bins = 50;
};

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  size_t count = 0;
};

/// Clips at the given percentile (linear interpolation between order
/// statistics; values equal to the clip are retained) and bins the remaining
/// values into equal-width bins over [0, clip].
std::vector<HistogramBin> priority_histogram(const std::vector<double>& values,
                                             const HistogramSpec& spec = {});

}  // namespace archsec
