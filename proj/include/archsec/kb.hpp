#pragma once

#include <nlohmann/json.hpp>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/vuln.hpp"

namespace archsec {

struct BadTechniqueId : std::runtime_error {
  explicit BadTechniqueId(const std::string& id)
      : std::runtime_error("not a technique id: " + id) {}
};

struct KbSchema : std::runtime_error {
  explicit KbSchema(const std::string& what) : std::runtime_error(what) {}
};

struct Technique {
  std::string id;  // "Txxxx" or "Txxxx.yyy"
  std::string name;
  std::string description;
  std::optional<std::string> parent_id;  // set iff id contains "."

  bool is_parent() const { return !parent_id.has_value(); }
};

struct Control {
  std::string id;  // e.g. "AC-3"
  std::string name;
  std::string description;
  std::string family;  // id prefix before "-"
};

struct CrosswalkEntry {
  std::string technique_id;
  std::string control_id;
};

enum class GroundTruthSource { Kev, Smet, WeakCweCapec };

const char* to_string(GroundTruthSource source);

struct GroundTruthPair {
  std::string cve_id;
  std::string technique_id;
  GroundTruthSource source = GroundTruthSource::Kev;

  bool operator==(const GroundTruthPair&) const = default;
};

struct WeakLabelConfig {
  size_t min_support = 1;
  bool collapse_to_parent = true;
};

struct GroundTruthLoadStats {
  size_t mapping_objects = 0;  // raw entries in the file
  size_t unique_cves = 0;
  size_t unique_pairs = 0;     // after parent collapse and dedup
  bool had_subtechniques = false;
};

bool is_technique_id(const std::string& id);

/// "Txxxx.yyy" -> "Txxxx"; parent ids pass through. Throws BadTechniqueId.
std::string collapse_to_parent(const std::string& technique_id);

/// Lowercases, strips URLs and CVE-id tokens, collapses whitespace runs and
/// trims. Idempotent.
std::string clean_text(const std::string& raw);

/// Immutable symbolic catalogs: ATT&CK techniques, NIST controls, the
/// technique-to-control crosswalk, exploitation ground truth and the
/// CWE -> CAPEC -> ATT&CK maps.
class KnowledgeBase {
 public:
  void load_techniques(const nlohmann::json& doc);
  void load_controls(const nlohmann::json& doc);
  void load_crosswalk(const nlohmann::json& doc);
  GroundTruthLoadStats load_ground_truth(const nlohmann::json& doc, GroundTruthSource source);
  void load_cwe_capec(const nlohmann::json& doc);
  void load_capec_attack(const nlohmann::json& doc);

  /// Loads the standard catalog files from a directory:
  /// attack_techniques.json, nist_controls.json, crosswalk.json,
  /// kev_groundtruth.json, cwe_capec.json, capec_attack.json.
  /// Missing ground-truth/map files are tolerated.
  static KnowledgeBase load_dir(const std::filesystem::path& dir);

  const std::vector<Technique>& techniques() const { return techniques_; }
  const std::vector<Control>& controls() const { return controls_; }
  const Technique* find_technique(const std::string& id) const;
  const Control* find_control(const std::string& id) const;
  std::vector<std::string> parent_technique_ids() const;  // sorted
  std::vector<Technique> parent_techniques() const;       // sorted by id

  /// Exact crosswalk lookup; empty list (not an error) for uncovered
  /// techniques; stable order by control id.
  std::vector<Control> lookup_controls(const std::string& technique_id) const;
  bool crosswalk_contains(const std::string& technique_id, const std::string& control_id) const;
  size_t crosswalk_technique_coverage() const;
  const std::map<std::string, std::set<std::string>>& crosswalk() const { return crosswalk_; }

  /// Transitive image of the CWE set under CWE->CAPEC and CAPEC->ATT&CK,
  /// collapsed to parents, restricted to loaded parent techniques,
  /// deduplicated and sorted. Unknown CWE ids contribute nothing.
  std::vector<std::string> derive_hint_techniques(const std::vector<std::string>& cwe_ids) const;

  /// Weak labels for classifier data prep: per CVE with CWE ids, transitive
  /// technique labels (optionally collapsed to parents); classes with fewer
  /// than min_support pairs are dropped.
  std::vector<GroundTruthPair> generate_weak_labels(const std::vector<CveRecord>& cves,
                                                    const WeakLabelConfig& config) const;

  const std::vector<GroundTruthPair>& ground_truth() const { return ground_truth_; }

 private:
  std::vector<Technique> techniques_;
  std::map<std::string, size_t> technique_index_;
  std::vector<Control> controls_;
  std::map<std::string, size_t> control_index_;
  std::map<std::string, std::set<std::string>> crosswalk_;  // technique -> control ids
  std::vector<GroundTruthPair> ground_truth_;
  std::map<std::string, std::vector<std::string>> cwe_capec_;
  std::map<std::string, std::vector<std::string>> capec_attack_;
};

}  // namespace archsec
