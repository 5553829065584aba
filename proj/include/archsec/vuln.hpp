#pragma once

#include <nlohmann/json.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/cpe.hpp"
#include "archsec/model.hpp"
#include "archsec/version.hpp"

namespace archsec {

struct FeedSchema : std::runtime_error {
  explicit FeedSchema(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyStore : std::runtime_error {
  EmptyStore() : std::runtime_error("vulnerability store is empty") {}
};

struct VersionBound {
  std::string version;
  bool inclusive = true;

  bool operator==(const VersionBound&) const = default;
};

/// One applicability statement of an NVD record: a CPE pattern plus an
/// optional version range.
struct MatchCriterion {
  CpeIdentifier cpe;
  std::optional<VersionBound> version_start;
  std::optional<VersionBound> version_end;

  bool operator==(const MatchCriterion&) const = default;
};

struct CveRecord {
  std::string id;
  std::string description;  // English description, may be empty
  std::optional<double> cvss_base;
  std::vector<std::string> cwe_ids;
  std::vector<MatchCriterion> criteria;
  int published_year = 0;

  bool usable() const;  // non-empty English description after trim
};

struct YearCounts {
  size_t total = 0;
  size_t usable = 0;
};

struct FeedInventory {
  std::map<int, YearCounts> per_year;

  size_t total() const;
  size_t usable() const;
};

struct FeedDiagnostic {
  std::string code;  // Skipped, BadCriterion, ...
  std::string detail;
};

struct IngestStats {
  size_t records_added = 0;
  size_t records_year_filtered = 0;
  FeedInventory inventory_delta;
  std::vector<FeedDiagnostic> diagnostics;
};

struct YearRange {
  int first = 0;
  int last = 9999;

  bool contains(int year) const { return year >= first && year <= last; }
};

enum class MatchKind { CpeRange, Description };

const char* to_string(MatchKind kind);

struct ScanMatch {
  std::string cve_id;
  MatchKind kind;
  std::optional<double> cvss;
};

struct ComponentScan {
  std::string block_name;
  std::vector<ScanMatch> matches;  // sorted by cvss desc, id asc
  double max_cvss = 0.0;
  bool cvss_missing = false;  // true when no matched record carried a score
};

struct ScanResult {
  std::vector<ComponentScan> components;
  size_t unique_cve_count = 0;
};

/// In-memory CVE store fed from NVD 2.0 style JSON documents. Ingest first,
/// then query; queries on an empty store throw EmptyStore.
class VulnStore {
 public:
  /// Parses one feed document. Records without an id are skipped with a
  /// diagnostic; duplicate ids overwrite (last wins). A year filter, when
  /// given, drops records published outside the range before they are
  /// stored. Throws FeedSchema when the document cannot be interpreted.
  IngestStats ingest_feed(const std::string& json_text,
                          const std::optional<YearRange>& years = std::nullopt);

  /// CVE matches for one component CPE: CPE_RANGE matches via vendor/product
  /// equality (criterion "*" matches anything) plus version-range checks;
  /// records with no criteria at all fall back to a case-insensitive
  /// product-name plus exact-version-substring search in the description.
  /// Result is deduplicated by id and sorted by cvss desc, id asc.
  std::vector<std::pair<const CveRecord*, MatchKind>> match_component(
      const CpeIdentifier& cpe) const;

  ScanResult scan_registry(const ComponentRegistry& registry) const;

  FeedInventory inventory() const;  // recomputed from stored records
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const CveRecord* find(const std::string& id) const;
  std::vector<const CveRecord*> records_sorted() const;  // ascending id

  nlohmann::ordered_json to_snapshot() const;
  static VulnStore from_snapshot(const nlohmann::json& doc);

 private:
  std::map<std::string, CveRecord> records_;
};

}  // namespace archsec
