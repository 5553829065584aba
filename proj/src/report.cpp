#include "archsec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace archsec {

std::vector<TraceRecord> assemble_traces(const TraceInputs& inputs, const TraceLimits& limits) {
  std::map<std::string, const TechniquePrediction*> prediction_of;
  for (const TechniquePrediction& p : inputs.predictions) prediction_of[p.cve_id] = &p;

  // First pass: per (component, technique), the CVEs that predicted it.
  std::map<std::pair<std::string, std::string>, std::vector<const CveRecord*>> group_cves;
  for (const ComponentScan& scan : inputs.scan.components) {
    if (!inputs.registry.find(scan.block_name)) {
      throw DanglingReference("component " + scan.block_name);
    }
    for (const ScanMatch& match : scan.matches) {
      const CveRecord* record = inputs.store.find(match.cve_id);
      if (!record) throw DanglingReference("cve " + match.cve_id);
      auto pred = prediction_of.find(match.cve_id);
      if (pred == prediction_of.end()) continue;  // unmapped CVE: no trace
      size_t taken = 0;
      for (const RankedEntry& entry : pred->second->ranked.entries) {
        if (++taken > limits.top_k_techniques) break;
        group_cves[{scan.block_name, entry.candidate_id}].push_back(record);
      }
    }
  }

  std::map<std::pair<std::string, std::string>, MaxCvss> group_cvss;
  for (const auto& [key, cves] : group_cves) {
    group_cvss[key] = aggregate_max_cvss(cves);
  }

  std::vector<TraceRecord> traces;
  for (const ComponentScan& scan : inputs.scan.components) {
    const Component* component = inputs.registry.find(scan.block_name);
    for (const ScanMatch& match : scan.matches) {
      auto pred = prediction_of.find(match.cve_id);
      if (pred == prediction_of.end()) continue;
      const CveRecord* record = inputs.store.find(match.cve_id);
      size_t taken_k = 0;
      for (const RankedEntry& entry : pred->second->ranked.entries) {
        if (++taken_k > limits.top_k_techniques) break;
        if (!inputs.kb.find_technique(entry.candidate_id)) {
          throw DanglingReference("technique " + entry.candidate_id);
        }
        auto controls = inputs.controls.find(entry.candidate_id);
        if (controls == inputs.controls.end()) continue;
        double max_cvss = group_cvss.at({scan.block_name, entry.candidate_id}).value;
        size_t taken_m = 0;
        for (const ScoredControl& sc : controls->second) {
          if (++taken_m > limits.top_m_controls) break;
          if (!inputs.kb.find_control(sc.control_id)) {
            throw DanglingReference("control " + sc.control_id);
          }
          ScoredControl prioritized = compute_priority(sc, max_cvss);
          TraceRecord trace;
          trace.component = component->block_name;
          trace.cpe = component->cpe.to_string();
          trace.cve_id = record->id;
          trace.cvss = record->cvss_base;
          trace.technique_id = entry.candidate_id;
          trace.technique_score = entry.score;
          trace.control_id = sc.control_id;
          trace.crosswalk_score = prioritized.crosswalk_score;
          trace.tfidf_score = prioritized.tfidf_score;
          trace.hybrid_score = prioritized.hybrid_score;
          trace.priority = prioritized.priority;
          trace.method = pred->second->method;
          traces.push_back(std::move(trace));
        }
      }
    }
  }

  std::sort(traces.begin(), traces.end(), [](const TraceRecord& a, const TraceRecord& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.component != b.component) return a.component < b.component;
    if (a.cve_id != b.cve_id) return a.cve_id < b.cve_id;
    if (a.technique_id != b.technique_id) return a.technique_id < b.technique_id;
    return a.control_id < b.control_id;
  });
  return traces;
}

nlohmann::ordered_json traces_to_json(const std::vector<TraceRecord>& traces) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const TraceRecord& t : traces) {
    nlohmann::ordered_json item{{"component", t.component},
                                {"cpe", t.cpe},
                                {"cve_id", t.cve_id},
                                {"cvss", nullptr},
                                {"technique_id", t.technique_id},
                                {"technique_score", t.technique_score},
                                {"control_id", t.control_id},
                                {"crosswalk_score", t.crosswalk_score},
                                {"tfidf_score", t.tfidf_score},
                                {"hybrid_score", t.hybrid_score},
                                {"priority", t.priority},
                                {"method", t.method}};
    if (t.cvss) item["cvss"] = *t.cvss;
    array.push_back(std::move(item));
  }
  return {{"traces", std::move(array)}};
}

std::vector<TraceRecord> traces_from_json(const nlohmann::json& doc) {
  std::vector<TraceRecord> traces;
  for (const auto& item : doc.at("traces")) {
    TraceRecord t;
    t.component = item.at("component").get<std::string>();
    t.cpe = item.at("cpe").get<std::string>();
    t.cve_id = item.at("cve_id").get<std::string>();
    if (!item.at("cvss").is_null()) t.cvss = item.at("cvss").get<double>();
    t.technique_id = item.at("technique_id").get<std::string>();
    t.technique_score = item.at("technique_score").get<double>();
    t.control_id = item.at("control_id").get<std::string>();
    t.crosswalk_score = item.at("crosswalk_score").get<double>();
    t.tfidf_score = item.at("tfidf_score").get<double>();
    t.hybrid_score = item.at("hybrid_score").get<double>();
    t.priority = item.at("priority").get<double>();
    t.method = item.at("method").get<std::string>();
    traces.push_back(std::move(t));
  }
  return traces;
}

namespace {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string markdown_report(const std::vector<TraceRecord>& traces) {
  std::ostringstream out;
  out << "# Security control recommendations\n";
  if (traces.empty()) {
    out << "\nNo traces.\n";
    return out.str();
  }

  // Per component: keep the global (priority-sorted) order within sections.
  std::vector<std::string> component_order;
  std::map<std::string, std::vector<const TraceRecord*>> by_component;
  for (const TraceRecord& t : traces) {
    auto [it, inserted] = by_component.try_emplace(t.component);
    if (inserted) component_order.push_back(t.component);
    it->second.push_back(&t);
  }
  std::sort(component_order.begin(), component_order.end());

  for (const std::string& name : component_order) {
    const auto& rows = by_component[name];
    out << "\n## " << name << "\n\n";
    out << "CPE: `" << rows.front()->cpe << "`\n";

    // Badge when some technique group fell back to the 0.0 CVSS default,
    // i.e. every contributing CVE of that group lacked a score.
    std::map<std::string, bool> group_all_missing;
    for (const TraceRecord* t : rows) {
      auto [it, inserted] = group_all_missing.try_emplace(t->technique_id, true);
      if (t->cvss) it->second = false;
    }
    bool missing = std::any_of(group_all_missing.begin(), group_all_missing.end(),
                               [](const auto& kv) { return kv.second; });
    if (missing) out << "\nMissing CVSS: priorities for this component use the 0.0 default.\n";

    out << "\n| Priority | Control | Technique | CVE | CVSS | Crosswalk | TF-IDF | Hybrid | "
           "Method |\n";
    out << "|---:|---|---|---|---:|---:|---:|---:|---|\n";
    for (const TraceRecord* t : rows) {
      out << "| " << fixed6(t->priority) << " | " << t->control_id << " | " << t->technique_id
          << " | " << t->cve_id << " | " << (t->cvss ? fixed6(*t->cvss) : std::string("-"))
          << " | " << fixed6(t->crosswalk_score) << " | " << fixed6(t->tfidf_score) << " | "
          << fixed6(t->hybrid_score) << " | " << t->method << " |\n";
    }
  }
  return out.str();
}

}  // namespace

std::string emit_report(const std::vector<TraceRecord>& traces, ReportFormat format) {
  if (format == ReportFormat::Json) {
    return traces_to_json(traces).dump(2) + "\n";
  }
  return markdown_report(traces);
}

std::vector<HistogramBin> priority_histogram(const std::vector<double>& values,
                                             const HistogramSpec& spec) {
  if (values.empty()) throw EmptyValues();
  if (spec.clip_percentile <= 0.0 || spec.clip_percentile > 100.0) {
    throw std::invalid_argument("clip_percentile must lie in (0, 100]");
  }
  if (spec.bins < 1) throw std::invalid_argument("bins must be >= 1");

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());

  // Linear interpolation between order statistics.
  double rank = spec.clip_percentile / 100.0 * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(rank));
  double frac = rank - static_cast<double>(lo);
  double clip = sorted[lo];
  if (lo + 1 < sorted.size()) clip += frac * (sorted[lo + 1] - sorted[lo]);

  std::vector<double> retained;
  for (double v : values) {
    if (v <= clip) retained.push_back(v);  // values equal to the clip stay
  }

  if (clip <= 0.0) {
    // Degenerate range: everything sits in a single [0, 0] bin.
    return {{0.0, 0.0, retained.size()}};
  }

  std::vector<HistogramBin> bins(spec.bins);
  double width = clip / static_cast<double>(spec.bins);
  for (size_t i = 0; i < spec.bins; ++i) {
    bins[i].lower = width * static_cast<double>(i);
    bins[i].upper = width * static_cast<double>(i + 1);
  }
  bins.back().upper = clip;

  for (double v : retained) {
    double pos = v / width;
    size_t index = pos < 0.0 ? 0 : static_cast<size_t>(pos);
    if (index >= spec.bins) index = spec.bins - 1;
    ++bins[index].count;
  }
  return bins;
}

}  // namespace archsec
