#include "archsec/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace archsec {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

std::vector<IngestStats> load_feed_dir(VulnStore& store, const std::filesystem::path& dir,
                                       const std::optional<YearRange>& years) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<IngestStats> stats;
  for (const auto& file : files) {
    stats.push_back(store.ingest_feed(read_file(file), years));
  }
  return stats;
}

std::vector<const CveRecord*> scanned_records(const ScanResult& scan, const VulnStore& store) {
  std::set<std::string> ids;
  for (const ComponentScan& component : scan.components) {
    for (const ScanMatch& match : component.matches) ids.insert(match.cve_id);
  }
  std::vector<const CveRecord*> records;
  for (const std::string& id : ids) {
    const CveRecord* record = store.find(id);
    if (record) records.push_back(record);
  }
  return records;
}

std::vector<std::pair<std::string, std::string>> nvd_sample_docs(
    const std::vector<const CveRecord*>& records) {
  std::vector<std::pair<std::string, std::string>> docs;
  for (const CveRecord* record : records) {
    std::string text = clean_text(record->description);
    if (!text.empty()) docs.emplace_back(record->id, std::move(text));
  }
  return docs;
}

std::vector<TechniquePrediction> predict_techniques(
    const PipelineConfig& config, const KnowledgeBase& kb, const ComponentRegistry& registry,
    const std::vector<const CveRecord*>& records, std::vector<std::string>& notes) {
  std::vector<TechniquePrediction> predictions;

  if (config.method.rfind("external:", 0) == 0) {
    std::filesystem::path path = config.method.substr(9);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open score file " + path.string());
    ExternalLoadResult loaded = load_external_scores(in);
    for (const std::string& warning : loaded.warnings) notes.push_back(warning);
    std::vector<std::string> candidates = kb.parent_technique_ids();
    for (const CveRecord* record : records) {
      TechniquePrediction p;
      p.cve_id = record->id;
      p.method = loaded.set.model_name;
      p.ranked = rank_from_external(loaded.set, record->id, candidates);
      p.ranked.truncate(config.top_k);
      predictions.push_back(std::move(p));
    }
    return predictions;
  }

  if (config.method != "tfidf") {
    throw std::runtime_error("unknown mapping method: " + config.method);
  }

  TechniqueMapper mapper(kb, registry, nvd_sample_docs(records));
  for (const CveRecord* record : records) {
    try {
      predictions.push_back(mapper.map_cve(*record, config.top_k));
    } catch (const EmptyDescription&) {
      notes.push_back(record->id + ": empty description, skipped");
    }
  }
  return predictions;
}

std::map<std::string, std::vector<ScoredControl>> recommend_for_predictions(
    const KnowledgeBase& kb, const ComponentRegistry& registry,
    const std::vector<TechniquePrediction>& predictions, size_t top_k) {
  std::set<std::string> technique_ids;
  for (const TechniquePrediction& p : predictions) {
    size_t taken = 0;
    for (const RankedEntry& entry : p.ranked.entries) {
      if (++taken > top_k) break;
      technique_ids.insert(entry.candidate_id);
    }
  }

  ControlRecommender recommender(kb, registry);
  std::map<std::string, std::vector<ScoredControl>> controls;
  for (const std::string& id : technique_ids) {
    controls[id] = recommender.recommend(id);
  }
  return controls;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  result.model = parse_sysml(read_file(config.model_path));
  result.kb = KnowledgeBase::load_dir(config.kb_dir);
  load_feed_dir(result.store, config.feeds_dir, config.years);
  result.scan = result.store.scan_registry(result.model.registry);

  std::vector<const CveRecord*> records = scanned_records(result.scan, result.store);
  result.predictions = predict_techniques(config, result.kb, result.model.registry, records,
                                          result.notes);
  result.controls = recommend_for_predictions(result.kb, result.model.registry,
                                              result.predictions, config.top_k);

  TraceInputs inputs{result.model.registry, result.scan,    result.store,
                     result.predictions,    result.controls, result.kb};
  result.traces = assemble_traces(inputs, {config.top_k, config.top_m});
  return result;
}

nlohmann::ordered_json scan_to_json(const ScanResult& scan, const ComponentRegistry& registry) {
  nlohmann::ordered_json components = nlohmann::ordered_json::array();
  for (const ComponentScan& component : scan.components) {
    nlohmann::ordered_json matches = nlohmann::ordered_json::array();
    for (const ScanMatch& match : component.matches) {
      nlohmann::ordered_json item{{"cve_id", match.cve_id},
                                  {"match_kind", to_string(match.kind)},
                                  {"cvss", nullptr}};
      if (match.cvss) item["cvss"] = *match.cvss;
      matches.push_back(std::move(item));
    }
    const Component* c = registry.find(component.block_name);
    components.push_back({{"block_name", component.block_name},
                          {"cpe", c ? c->cpe.to_string() : ""},
                          {"matches", std::move(matches)},
                          {"max_cvss", component.max_cvss},
                          {"cvss_missing", component.cvss_missing}});
  }
  return {{"components", std::move(components)},
          {"unique_cve_count", scan.unique_cve_count}};
}

nlohmann::ordered_json predictions_to_json(const std::vector<TechniquePrediction>& predictions) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const TechniquePrediction& p : predictions) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const RankedEntry& entry : p.ranked.entries) {
      entries.push_back({{"candidate_id", entry.candidate_id},
                         {"score", entry.scored ? nlohmann::ordered_json(entry.score)
                                                : nlohmann::ordered_json(nullptr)},
                         {"rank", entry.rank}});
    }
    array.push_back(
        {{"cve_id", p.cve_id}, {"method", p.method}, {"entries", std::move(entries)}});
  }
  return {{"predictions", std::move(array)}};
}

std::vector<TechniquePrediction> predictions_from_json(const nlohmann::json& doc) {
  std::vector<TechniquePrediction> predictions;
  for (const auto& item : doc.at("predictions")) {
    TechniquePrediction p;
    p.cve_id = item.at("cve_id").get<std::string>();
    p.method = item.at("method").get<std::string>();
    p.ranked.query_id = p.cve_id;
    for (const auto& e : item.at("entries")) {
      RankedEntry entry;
      entry.candidate_id = e.at("candidate_id").get<std::string>();
      if (e.at("score").is_null()) {
        entry.score = -std::numeric_limits<double>::infinity();
        entry.scored = false;
      } else {
        entry.score = e.at("score").get<double>();
      }
      entry.rank = e.at("rank").get<size_t>();
      p.ranked.entries.push_back(std::move(entry));
    }
    predictions.push_back(std::move(p));
  }
  return predictions;
}

nlohmann::ordered_json controls_to_json(
    const std::map<std::string, std::vector<ScoredControl>>& controls) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& [technique_id, list] : controls) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const ScoredControl& sc : list) {
      entries.push_back({{"control_id", sc.control_id},
                         {"crosswalk_score", sc.crosswalk_score},
                         {"tfidf_score", sc.tfidf_score},
                         {"hybrid_score", sc.hybrid_score}});
    }
    array.push_back({{"technique_id", technique_id}, {"controls", std::move(entries)}});
  }
  return {{"recommendations", std::move(array)}};
}

std::map<std::string, std::vector<ScoredControl>> controls_from_json(
    const nlohmann::json& doc) {
  std::map<std::string, std::vector<ScoredControl>> controls;
  for (const auto& item : doc.at("recommendations")) {
    std::string technique_id = item.at("technique_id").get<std::string>();
    std::vector<ScoredControl> list;
    for (const auto& e : item.at("controls")) {
      ScoredControl sc;
      sc.technique_id = technique_id;
      sc.control_id = e.at("control_id").get<std::string>();
      sc.crosswalk_score = e.at("crosswalk_score").get<double>();
      sc.tfidf_score = e.at("tfidf_score").get<double>();
      sc.hybrid_score = e.at("hybrid_score").get<double>();
      list.push_back(std::move(sc));
    }
    controls[technique_id] = std::move(list);
  }
  return controls;
}

}  // namespace archsec
