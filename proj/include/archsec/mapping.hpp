#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/kb.hpp"
#include "archsec/model.hpp"
#include "archsec/retrieval.hpp"
#include "archsec/vuln.hpp"

namespace archsec {

struct EmptyDescription : std::runtime_error {
  explicit EmptyDescription(const std::string& cve_id)
      : std::runtime_error(cve_id + " has no usable description") {}
};

struct UnknownTechnique : std::runtime_error {
  explicit UnknownTechnique(const std::string& id)
      : std::runtime_error("unknown technique: " + id) {}
};

struct CvssOutOfRange : std::runtime_error {
  explicit CvssOutOfRange(double value)
      : std::runtime_error("cvss out of [0,10]: " + std::to_string(value)) {}
};

/// Ranked technique hypotheses for one CVE.
struct TechniquePrediction {
  std::string cve_id;
  RankedList ranked;   // over parent technique ids
  std::string method;  // model name
};

inline constexpr double kCrosswalkWeight = 0.72;
inline constexpr double kTfidfWeight = 0.28;

inline double hybrid_score(double crosswalk, double tfidf) {
  return kCrosswalkWeight * crosswalk + kTfidfWeight * tfidf;
}

/// One (technique, control) recommendation with its score breakdown.
struct ScoredControl {
  std::string technique_id;
  std::string control_id;
  double crosswalk_score = 0.0;  // 1.0 iff the pair is in the crosswalk
  double tfidf_score = 0.0;      // cosine of technique and control texts
  double hybrid_score = 0.0;     // 0.72 * crosswalk + 0.28 * tfidf
  double priority = 0.0;         // hybrid * max_cvss
  double max_cvss = 0.0;
};

struct MaxCvss {
  double value = 0.0;
  bool missing = false;  // no record carried a base score
};

/// Maximum base score over records that have one; 0.0 with the missing flag
/// when none do.
MaxCvss aggregate_max_cvss(const std::vector<const CveRecord*>& cves);

/// Stamps priority = hybrid * max_cvss onto a recommendation. Throws
/// CvssOutOfRange when max_cvss is outside [0, 10].
ScoredControl compute_priority(ScoredControl control, double max_cvss);

/// CVE -> technique ranking over a TF-IDF index fitted on technique texts,
/// the system-of-interest profile and a sample of vulnerability
/// descriptions.
class TechniqueMapper {
 public:
  /// nvd_sample: (cve_id, cleaned description) documents added to the fit
  /// corpus for idf statistics only; candidates stay the parent techniques.
  TechniqueMapper(const KnowledgeBase& kb, const ComponentRegistry& soi,
                  const std::vector<std::pair<std::string, std::string>>& nvd_sample);

  /// Top-k techniques for the cleaned CVE description. Throws
  /// EmptyDescription when nothing is left after cleaning.
  TechniquePrediction map_cve(const CveRecord& cve, size_t k) const;

  const TfidfIndex& index() const { return index_; }
  const std::vector<std::string>& candidate_ids() const { return technique_ids_; }

 private:
  TfidfIndex index_;
  std::vector<std::string> technique_ids_;
};

/// Technique -> control recommendation over a TF-IDF index fitted on
/// technique texts, control texts and the system-of-interest profile.
class ControlRecommender {
 public:
  ControlRecommender(const KnowledgeBase& kb, const ComponentRegistry& soi);

  /// Every catalog control scored for the technique: binary crosswalk score,
  /// text similarity, and the hybrid combination; sorted hybrid-descending
  /// with ties broken by ascending control id. Priority is left at zero.
  std::vector<ScoredControl> recommend(const std::string& technique_id) const;

 private:
  const KnowledgeBase* kb_;
  TfidfIndex index_;
  std::vector<std::string> control_ids_;
};

}  // namespace archsec
