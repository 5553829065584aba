#include <doctest.h>

#include <set>

#include "archsec/kb.hpp"

using namespace archsec;

namespace {

const char* kKbDir = ARCHSEC_FIXTURES "/kb";

const KnowledgeBase& fixture_kb() {
  static KnowledgeBase kb = KnowledgeBase::load_dir(kKbDir);
  return kb;
}

}  // namespace

TEST_CASE("collapse_to_parent strips sub-technique suffixes") {
  CHECK(collapse_to_parent("T1059.001") == "T1059");
  CHECK(collapse_to_parent("T1190") == "T1190");
  CHECK(collapse_to_parent(collapse_to_parent("T1059.001")) ==
        collapse_to_parent("T1059.001"));
  CHECK_THROWS_AS(collapse_to_parent("1059"), BadTechniqueId);
  CHECK_THROWS_AS(collapse_to_parent("T105"), BadTechniqueId);
  CHECK_THROWS_AS(collapse_to_parent("T1059.1"), BadTechniqueId);
}

TEST_CASE("technique catalog derives parent ids") {
  KnowledgeBase kb;
  kb.load_techniques(nlohmann::json::parse(
      R"([{"id":"T1059","name":"a","description":""},
          {"id":"T1059.001","name":"b","description":""}])"));
  CHECK(kb.find_technique("T1059")->is_parent());
  REQUIRE(kb.find_technique("T1059.001") != nullptr);
  CHECK(kb.find_technique("T1059.001")->parent_id == "T1059");
  CHECK(kb.parent_technique_ids() == std::vector<std::string>{"T1059"});
}

TEST_CASE("lookup_controls returns the exact crosswalk rows in id order") {
  const KnowledgeBase& kb = fixture_kb();
  std::vector<Control> controls = kb.lookup_controls("T1190");
  std::vector<std::string> ids;
  for (const Control& c : controls) ids.push_back(c.id);
  CHECK(ids == std::vector<std::string>{"AC-3", "CM-7", "RA-5", "SC-7", "SI-10", "SI-3"});

  // Soundness: every returned pair appears in the crosswalk.
  for (const auto& [technique, control_set] : kb.crosswalk()) {
    for (const Control& c : kb.lookup_controls(technique)) {
      CHECK(control_set.count(c.id) == 1);
    }
  }
}

TEST_CASE("uncovered techniques yield an empty control list") {
  CHECK(fixture_kb().lookup_controls("T1040").empty());
  CHECK(fixture_kb().lookup_controls("T9999").empty());
}

TEST_CASE("crosswalk loading validates references") {
  KnowledgeBase kb;
  kb.load_techniques(nlohmann::json::parse(R"([{"id":"T1190","name":"x"}])"));
  kb.load_controls(nlohmann::json::parse(R"([{"id":"AC-3","name":"y"}])"));
  CHECK_THROWS_AS(
      kb.load_crosswalk(nlohmann::json::parse(
          R"([{"technique_id":"T9999","control_id":"AC-3"}])")),
      KbSchema);
  CHECK_THROWS_AS(
      kb.load_crosswalk(nlohmann::json::parse(
          R"([{"technique_id":"T1190","control_id":"ZZ-1"}])")),
      KbSchema);
}

TEST_CASE("ground truth load collapses sub-techniques and records stats") {
  KnowledgeBase kb;
  GroundTruthLoadStats stats = kb.load_ground_truth(
      nlohmann::json::parse(
          R"([{"cve_id":"CVE-1","technique_id":"T1059.001"},
              {"cve_id":"CVE-1","technique_id":"T1059.002"},
              {"cve_id":"CVE-1","technique_id":"T1059"},
              {"cve_id":"CVE-2","technique_id":"T1190"}])"),
      GroundTruthSource::Kev);
  CHECK(stats.mapping_objects == 4);
  CHECK(stats.unique_cves == 2);
  CHECK(stats.unique_pairs == 2);  // the three T1059 variants collapse to one pair
  CHECK(stats.had_subtechniques);
  CHECK(kb.ground_truth().size() == 2);
}

TEST_CASE("derive_hint_techniques walks the transitive maps") {
  const KnowledgeBase& kb = fixture_kb();
  CHECK(kb.derive_hint_techniques({}).empty());
  CHECK(kb.derive_hint_techniques({"CWE-9999"}).empty());
  // CWE-20 -> CAPEC-10 -> T1059.001 (collapses) and CAPEC-66 -> T1190.
  CHECK(kb.derive_hint_techniques({"CWE-20"}) ==
        std::vector<std::string>{"T1059", "T1190"});
  // Diamond: CWE-917 and CWE-89 both end at T1190; it appears once.
  CHECK(kb.derive_hint_techniques({"CWE-917", "CWE-89"}) ==
        std::vector<std::string>{"T1190"});

  // Brute-force oracle over the fixture maps.
  auto oracle = [&](const std::vector<std::string>& cwes) {
    std::map<std::string, std::vector<std::string>> cwe_capec{
        {"CWE-502", {"CAPEC-586"}}, {"CWE-917", {"CAPEC-137"}},
        {"CWE-74", {"CAPEC-137"}},  {"CWE-295", {"CAPEC-94"}},
        {"CWE-89", {"CAPEC-66"}},   {"CWE-20", {"CAPEC-10", "CAPEC-66"}},
        {"CWE-787", {"CAPEC-100"}}};
    std::map<std::string, std::vector<std::string>> capec_attack{
        {"CAPEC-586", {"T1059"}}, {"CAPEC-137", {"T1190"}}, {"CAPEC-94", {"T1557"}},
        {"CAPEC-66", {"T1190"}},  {"CAPEC-10", {"T1059.001"}}, {"CAPEC-100", {"T1068"}}};
    std::set<std::string> out;
    for (const auto& cwe : cwes) {
      if (!cwe_capec.count(cwe)) continue;
      for (const auto& capec : cwe_capec[cwe]) {
        if (!capec_attack.count(capec)) continue;
        for (const auto& t : capec_attack[capec]) out.insert(collapse_to_parent(t));
      }
    }
    return std::vector<std::string>(out.begin(), out.end());
  };
  for (const std::vector<std::string>& cwes :
       std::vector<std::vector<std::string>>{{"CWE-502"},
                                             {"CWE-502", "CWE-917"},
                                             {"CWE-20", "CWE-89", "CWE-787"},
                                             {"CWE-295", "CWE-74"}}) {
    CHECK(kb.derive_hint_techniques(cwes) == oracle(cwes));
  }
}

TEST_CASE("hints are always loaded parent techniques") {
  const KnowledgeBase& kb = fixture_kb();
  std::vector<std::string> parents = kb.parent_technique_ids();
  std::set<std::string> parent_set(parents.begin(), parents.end());
  for (const std::string& hint :
       kb.derive_hint_techniques({"CWE-502", "CWE-917", "CWE-20", "CWE-89", "CWE-295"})) {
    CHECK(parent_set.count(hint) == 1);
  }
}

TEST_CASE("generate_weak_labels applies the min-support filter") {
  const KnowledgeBase& kb = fixture_kb();

  auto cve = [](const std::string& id, std::vector<std::string> cwes) {
    CveRecord r;
    r.id = id;
    r.cwe_ids = std::move(cwes);
    return r;
  };
  // Class counts: T1059 x2 (via CWE-502), T1190 x1 (via CWE-917).
  std::vector<CveRecord> cves = {cve("CVE-1", {"CWE-502"}), cve("CVE-2", {"CWE-502"}),
                                 cve("CVE-3", {"CWE-917"}), cve("CVE-4", {})};

  WeakLabelConfig keep_all{1, true};
  std::vector<GroundTruthPair> all = kb.generate_weak_labels(cves, keep_all);
  CHECK(all.size() == 3);
  for (const GroundTruthPair& p : all) CHECK(p.source == GroundTruthSource::WeakCweCapec);

  WeakLabelConfig min2{2, true};
  std::vector<GroundTruthPair> filtered = kb.generate_weak_labels(cves, min2);
  REQUIRE(filtered.size() == 2);
  CHECK(filtered[0].technique_id == "T1059");
  CHECK(filtered[1].technique_id == "T1059");

  // Every surviving class has at least min_support pairs.
  std::map<std::string, size_t> counts;
  for (const GroundTruthPair& p : filtered) ++counts[p.technique_id];
  for (const auto& [technique, count] : counts) CHECK(count >= 2);
}

TEST_CASE("weak labels keep sub-techniques when collapse is off") {
  const KnowledgeBase& kb = fixture_kb();
  CveRecord r;
  r.id = "CVE-5";
  r.cwe_ids = {"CWE-20"};
  std::vector<GroundTruthPair> labels = kb.generate_weak_labels({r}, {1, false});
  std::set<std::string> ids;
  for (const GroundTruthPair& p : labels) ids.insert(p.technique_id);
  CHECK(ids == std::set<std::string>{"T1059.001", "T1190"});
}

TEST_CASE("clean_text strips urls and cve tokens") {
  // Oracle: lowercase, strip URLs, strip CVE ids, collapse whitespace.
  CHECK(clean_text("See  https://x.y  CVE-2021-44228") == "see");
  CHECK(clean_text("") == "");
  CHECK(clean_text("  A  B\t C \n") == "a b c");
  CHECK(clean_text("before http://a.example/path?q=1 after") == "before after");
  std::string messy = "Apache  Log4j2 CVE-2021-44228 https://nvd.nist.gov/vuln "
                      "allows REMOTE code\texecution";
  CHECK(clean_text(clean_text(messy)) == clean_text(messy));
  CHECK(clean_text(messy) == "apache log4j2 allows remote code execution");
}
