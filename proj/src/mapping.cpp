#include "archsec/mapping.hpp"

#include <algorithm>

namespace archsec {

namespace {

std::string technique_text(const Technique& t) { return t.name + ". " + t.description; }

std::string control_text(const Control& c) { return c.name + ". " + c.description; }

}  // namespace

MaxCvss aggregate_max_cvss(const std::vector<const CveRecord*>& cves) {
  MaxCvss out;
  bool any = false;
  for (const CveRecord* cve : cves) {
    if (!cve->cvss_base) continue;
    any = true;
    out.value = std::max(out.value, *cve->cvss_base);
  }
  out.missing = !any;
  return out;
}

ScoredControl compute_priority(ScoredControl control, double max_cvss) {
  if (max_cvss < 0.0 || max_cvss > 10.0) throw CvssOutOfRange(max_cvss);
  control.max_cvss = max_cvss;
  control.priority = control.hybrid_score * max_cvss;
  return control;
}

TechniqueMapper::TechniqueMapper(
    const KnowledgeBase& kb, const ComponentRegistry& soi,
    const std::vector<std::pair<std::string, std::string>>& nvd_sample) {
  std::vector<std::pair<std::string, std::string>> corpus;
  for (const Technique& t : kb.parent_techniques()) {
    technique_ids_.push_back(t.id);
    corpus.emplace_back(t.id, technique_text(t));
  }
  corpus.emplace_back("soi:profile", registry_profile_text(soi));
  for (const auto& [cve_id, text] : nvd_sample) {
    corpus.emplace_back("nvd:" + cve_id, text);
  }
  index_ = TfidfIndex::fit(corpus);
}

TechniquePrediction TechniqueMapper::map_cve(const CveRecord& cve, size_t k) const {
  std::string query = clean_text(cve.description);
  if (query.empty()) throw EmptyDescription(cve.id);

  TechniquePrediction prediction;
  prediction.cve_id = cve.id;
  prediction.method = "tfidf";
  prediction.ranked = index_.score_query(query, technique_ids_, cve.id);
  prediction.ranked.truncate(k);
  return prediction;
}

ControlRecommender::ControlRecommender(const KnowledgeBase& kb, const ComponentRegistry& soi)
    : kb_(&kb) {
  std::vector<std::pair<std::string, std::string>> corpus;
  for (const Technique& t : kb.techniques()) {
    corpus.emplace_back(t.id, technique_text(t));
  }
  for (const Control& c : kb.controls()) {
    control_ids_.push_back(c.id);
    corpus.emplace_back(c.id, control_text(c));
  }
  std::sort(control_ids_.begin(), control_ids_.end());
  corpus.emplace_back("soi:profile", registry_profile_text(soi));
  index_ = TfidfIndex::fit(corpus);
}

std::vector<ScoredControl> ControlRecommender::recommend(const std::string& technique_id) const {
  if (!kb_->find_technique(technique_id)) throw UnknownTechnique(technique_id);

  std::vector<ScoredControl> out;
  out.reserve(control_ids_.size());
  for (const std::string& control_id : control_ids_) {
    ScoredControl sc;
    sc.technique_id = technique_id;
    sc.control_id = control_id;
    sc.crosswalk_score = kb_->crosswalk_contains(technique_id, control_id) ? 1.0 : 0.0;
    sc.tfidf_score = index_.doc_cosine(technique_id, control_id);
    sc.hybrid_score = hybrid_score(sc.crosswalk_score, sc.tfidf_score);
    out.push_back(std::move(sc));
  }
  std::sort(out.begin(), out.end(), [](const ScoredControl& a, const ScoredControl& b) {
    if (a.hybrid_score != b.hybrid_score) return a.hybrid_score > b.hybrid_score;
    return a.control_id < b.control_id;
  });
  return out;
}

}  // namespace archsec
