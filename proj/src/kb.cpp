#include "archsec/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace archsec {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw KbSchema("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw KbSchema(path.string() + ": " + e.what());
  }
}

const std::regex& technique_pattern() {
  static const std::regex pattern(R"(T\d{4}(\.\d{3})?)");
  return pattern;
}

}  // namespace

const char* to_string(GroundTruthSource source) {
  switch (source) {
    case GroundTruthSource::Kev: return "KEV";
    case GroundTruthSource::Smet: return "SMET";
    case GroundTruthSource::WeakCweCapec: return "WEAK_CWE_CAPEC";
  }
  return "KEV";
}

bool is_technique_id(const std::string& id) {
  return std::regex_match(id, technique_pattern());
}

std::string collapse_to_parent(const std::string& technique_id) {
  if (!is_technique_id(technique_id)) throw BadTechniqueId(technique_id);
  size_t dot = technique_id.find('.');
  return dot == std::string::npos ? technique_id : technique_id.substr(0, dot);
}

std::string clean_text(const std::string& raw) {
  std::string text;
  text.reserve(raw.size());
  for (unsigned char c : raw) text.push_back(static_cast<char>(std::tolower(c)));

  static const std::regex url(R"(https?://\S+)");
  static const std::regex cve_token(R"(cve-\d{4}-\d+)");
  text = std::regex_replace(text, url, " ");
  text = std::regex_replace(text, cve_token, " ");

  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_space = !out.empty();
      continue;
    }
    if (in_space) {
      out.push_back(' ');
      in_space = false;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

void KnowledgeBase::load_techniques(const nlohmann::json& doc) {
  if (!doc.is_array()) throw KbSchema("technique catalog must be a JSON array");
  for (const auto& item : doc) {
    Technique t;
    t.id = item.at("id").get<std::string>();
    if (!is_technique_id(t.id)) throw KbSchema("bad technique id: " + t.id);
    t.name = item.at("name").get<std::string>();
    t.description = item.value("description", "");
    size_t dot = t.id.find('.');
    if (dot != std::string::npos) t.parent_id = t.id.substr(0, dot);
    technique_index_[t.id] = techniques_.size();
    techniques_.push_back(std::move(t));
  }
}

void KnowledgeBase::load_controls(const nlohmann::json& doc) {
  if (!doc.is_array()) throw KbSchema("control catalog must be a JSON array");
  for (const auto& item : doc) {
    Control c;
    c.id = item.at("id").get<std::string>();
    c.name = item.at("name").get<std::string>();
    c.description = item.value("description", "");
    size_t dash = c.id.find('-');
    if (dash == std::string::npos) throw KbSchema("bad control id: " + c.id);
    c.family = c.id.substr(0, dash);
    if (item.contains("family") && item["family"].get<std::string>() != c.family) {
      throw KbSchema("family does not match id prefix: " + c.id);
    }
    control_index_[c.id] = controls_.size();
    controls_.push_back(std::move(c));
  }
}

void KnowledgeBase::load_crosswalk(const nlohmann::json& doc) {
  if (!doc.is_array()) throw KbSchema("crosswalk must be a JSON array");
  for (const auto& item : doc) {
    std::string technique = item.at("technique_id").get<std::string>();
    std::string control = item.at("control_id").get<std::string>();
    if (!technique_index_.count(technique)) {
      throw KbSchema("crosswalk references unknown technique " + technique);
    }
    if (!control_index_.count(control)) {
      throw KbSchema("crosswalk references unknown control " + control);
    }
    crosswalk_[technique].insert(control);
  }
}

GroundTruthLoadStats KnowledgeBase::load_ground_truth(const nlohmann::json& doc,
                                                      GroundTruthSource source) {
  if (!doc.is_array()) throw KbSchema("ground truth must be a JSON array");
  GroundTruthLoadStats stats;
  std::set<std::string> cves;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& item : doc) {
    ++stats.mapping_objects;
    std::string cve = item.at("cve_id").get<std::string>();
    std::string technique = item.at("technique_id").get<std::string>();
    if (technique.find('.') != std::string::npos) stats.had_subtechniques = true;
    technique = collapse_to_parent(technique);
    cves.insert(cve);
    if (pairs.emplace(cve, technique).second) {
      ground_truth_.push_back({cve, technique, source});
    }
  }
  stats.unique_cves = cves.size();
  stats.unique_pairs = pairs.size();
  return stats;
}

void KnowledgeBase::load_cwe_capec(const nlohmann::json& doc) {
  if (!doc.is_array()) throw KbSchema("cwe_capec map must be a JSON array");
  for (const auto& item : doc) {
    cwe_capec_[item.at("cwe_id").get<std::string>()].push_back(
        item.at("capec_id").get<std::string>());
  }
}

void KnowledgeBase::load_capec_attack(const nlohmann::json& doc) {
  if (!doc.is_array()) throw KbSchema("capec_attack map must be a JSON array");
  for (const auto& item : doc) {
    capec_attack_[item.at("capec_id").get<std::string>()].push_back(
        item.at("technique_id").get<std::string>());
  }
}

KnowledgeBase KnowledgeBase::load_dir(const std::filesystem::path& dir) {
  KnowledgeBase kb;
  kb.load_techniques(read_json_file(dir / "attack_techniques.json"));
  kb.load_controls(read_json_file(dir / "nist_controls.json"));
  kb.load_crosswalk(read_json_file(dir / "crosswalk.json"));
  if (std::filesystem::exists(dir / "kev_groundtruth.json")) {
    kb.load_ground_truth(read_json_file(dir / "kev_groundtruth.json"), GroundTruthSource::Kev);
  }
  if (std::filesystem::exists(dir / "cwe_capec.json")) {
    kb.load_cwe_capec(read_json_file(dir / "cwe_capec.json"));
  }
  if (std::filesystem::exists(dir / "capec_attack.json")) {
    kb.load_capec_attack(read_json_file(dir / "capec_attack.json"));
  }
  return kb;
}

const Technique* KnowledgeBase::find_technique(const std::string& id) const {
  auto it = technique_index_.find(id);
  return it == technique_index_.end() ? nullptr : &techniques_[it->second];
}

const Control* KnowledgeBase::find_control(const std::string& id) const {
  auto it = control_index_.find(id);
  return it == control_index_.end() ? nullptr : &controls_[it->second];
}

std::vector<std::string> KnowledgeBase::parent_technique_ids() const {
  std::vector<std::string> out;
  for (const Technique& t : techniques_) {
    if (t.is_parent()) out.push_back(t.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Technique> KnowledgeBase::parent_techniques() const {
  std::vector<Technique> out;
  for (const Technique& t : techniques_) {
    if (t.is_parent()) out.push_back(t);
  }
  std::sort(out.begin(), out.end(),
            [](const Technique& a, const Technique& b) { return a.id < b.id; });
  return out;
}

std::vector<Control> KnowledgeBase::lookup_controls(const std::string& technique_id) const {
  std::vector<Control> out;
  auto it = crosswalk_.find(technique_id);
  if (it == crosswalk_.end()) return out;
  for (const std::string& control_id : it->second) {
    const Control* control = find_control(control_id);
    if (control) out.push_back(*control);
  }
  return out;  // set iteration is already ordered by control id
}

bool KnowledgeBase::crosswalk_contains(const std::string& technique_id,
                                       const std::string& control_id) const {
  auto it = crosswalk_.find(technique_id);
  return it != crosswalk_.end() && it->second.count(control_id) > 0;
}

size_t KnowledgeBase::crosswalk_technique_coverage() const { return crosswalk_.size(); }

std::vector<std::string> KnowledgeBase::derive_hint_techniques(
    const std::vector<std::string>& cwe_ids) const {
  std::set<std::string> result;
  for (const std::string& cwe : cwe_ids) {
    auto capecs = cwe_capec_.find(cwe);
    if (capecs == cwe_capec_.end()) continue;
    for (const std::string& capec : capecs->second) {
      auto techniques = capec_attack_.find(capec);
      if (techniques == capec_attack_.end()) continue;
      for (const std::string& technique : techniques->second) {
        if (!is_technique_id(technique)) continue;
        std::string parent = collapse_to_parent(technique);
        const Technique* known = find_technique(parent);
        if (known && known->is_parent()) result.insert(parent);
      }
    }
  }
  return {result.begin(), result.end()};
}

std::vector<GroundTruthPair> KnowledgeBase::generate_weak_labels(
    const std::vector<CveRecord>& cves, const WeakLabelConfig& config) const {
  // Transitive labels per CVE, deduplicated per (cve, technique).
  std::vector<GroundTruthPair> pairs;
  std::map<std::string, size_t> class_counts;
  for (const CveRecord& cve : cves) {
    std::set<std::string> labels;
    for (const std::string& cwe : cve.cwe_ids) {
      auto capecs = cwe_capec_.find(cwe);
      if (capecs == cwe_capec_.end()) continue;
      for (const std::string& capec : capecs->second) {
        auto techniques = capec_attack_.find(capec);
        if (techniques == capec_attack_.end()) continue;
        for (const std::string& technique : techniques->second) {
          if (!is_technique_id(technique)) continue;
          labels.insert(config.collapse_to_parent ? collapse_to_parent(technique) : technique);
        }
      }
    }
    for (const std::string& label : labels) {
      pairs.push_back({cve.id, label, GroundTruthSource::WeakCweCapec});
      ++class_counts[label];
    }
  }

  std::vector<GroundTruthPair> kept;
  for (GroundTruthPair& pair : pairs) {
    if (class_counts[pair.technique_id] >= config.min_support) {
      kept.push_back(std::move(pair));
    }
  }
  return kept;
}

}  // namespace archsec
