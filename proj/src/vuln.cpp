#include "archsec/vuln.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace archsec {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

int year_from_record(const nlohmann::json& cve, const std::string& id) {
  if (cve.contains("published") && cve["published"].is_string()) {
    const std::string& p = cve["published"].get_ref<const std::string&>();
    if (p.size() >= 4) {
      try {
        return std::stoi(p.substr(0, 4));
      } catch (const std::exception&) {
      }
    }
  }
  // CVE-YYYY-NNNN fallback
  if (id.size() >= 8 && id.rfind("CVE-", 0) == 0) {
    try {
      return std::stoi(id.substr(4, 4));
    } catch (const std::exception&) {
    }
  }
  return 0;
}

std::optional<double> pick_cvss(const nlohmann::json& cve) {
  if (!cve.contains("metrics") || !cve["metrics"].is_object()) return std::nullopt;
  const auto& metrics = cve["metrics"];
  // Highest CVSS version wins; within a version, the maximum across sources.
  for (const char* key : {"cvssMetricV31", "cvssMetricV30", "cvssMetricV2"}) {
    if (!metrics.contains(key) || !metrics[key].is_array() || metrics[key].empty()) continue;
    std::optional<double> best;
    for (const auto& entry : metrics[key]) {
      if (!entry.contains("cvssData")) continue;
      const auto& data = entry["cvssData"];
      if (!data.contains("baseScore") || !data["baseScore"].is_number()) continue;
      double score = data["baseScore"].get<double>();
      if (!best || score > *best) best = score;
    }
    if (best) return best;
  }
  return std::nullopt;
}

std::string english_description(const nlohmann::json& cve) {
  if (!cve.contains("descriptions") || !cve["descriptions"].is_array()) return "";
  for (const auto& d : cve["descriptions"]) {
    if (d.value("lang", "") == "en") return trim(d.value("value", ""));
  }
  return "";
}

std::vector<std::string> cwe_ids(const nlohmann::json& cve) {
  std::vector<std::string> out;
  if (!cve.contains("weaknesses") || !cve["weaknesses"].is_array()) return out;
  for (const auto& w : cve["weaknesses"]) {
    if (!w.contains("description") || !w["description"].is_array()) continue;
    for (const auto& d : w["description"]) {
      std::string value = d.value("value", "");
      if (value.rfind("CWE-", 0) == 0 &&
          std::find(out.begin(), out.end(), value) == out.end()) {
        out.push_back(value);
      }
    }
  }
  return out;
}

std::optional<VersionBound> bound(const nlohmann::json& match, const char* including,
                                  const char* excluding) {
  if (match.contains(including) && match[including].is_string()) {
    return VersionBound{match[including].get<std::string>(), true};
  }
  if (match.contains(excluding) && match[excluding].is_string()) {
    return VersionBound{match[excluding].get<std::string>(), false};
  }
  return std::nullopt;
}

bool field_matches(const std::string& criterion_field, const std::string& component_field) {
  return criterion_field == "*" || criterion_field == component_field;
}

bool criterion_matches(const MatchCriterion& criterion, const CpeIdentifier& component) {
  if (criterion.cpe.part != component.part) return false;
  if (!field_matches(criterion.cpe.vendor, component.vendor)) return false;
  if (!field_matches(criterion.cpe.product, component.product)) return false;

  if (criterion.cpe.version != "*") {
    // Exact-version criterion.
    if (component.version == "*") return false;
    return version_compare(component.version, criterion.cpe.version) == VersionOrder::EQ;
  }
  if (component.version == "*") {
    // A wildcard component version matches only product-wide criteria.
    return !criterion.version_start && !criterion.version_end;
  }
  if (criterion.version_start) {
    VersionOrder cmp = version_compare(component.version, criterion.version_start->version);
    if (cmp == VersionOrder::LT) return false;
    if (cmp == VersionOrder::EQ && !criterion.version_start->inclusive) return false;
  }
  if (criterion.version_end) {
    VersionOrder cmp = version_compare(component.version, criterion.version_end->version);
    if (cmp == VersionOrder::GT) return false;
    if (cmp == VersionOrder::EQ && !criterion.version_end->inclusive) return false;
  }
  return true;
}

}  // namespace

bool CveRecord::usable() const { return !trim(description).empty(); }

size_t FeedInventory::total() const {
  size_t n = 0;
  for (const auto& [year, counts] : per_year) n += counts.total;
  return n;
}

size_t FeedInventory::usable() const {
  size_t n = 0;
  for (const auto& [year, counts] : per_year) n += counts.usable;
  return n;
}

const char* to_string(MatchKind kind) {
  return kind == MatchKind::CpeRange ? "CPE_RANGE" : "DESCRIPTION";
}

IngestStats VulnStore::ingest_feed(const std::string& json_text,
                                   const std::optional<YearRange>& years) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FeedSchema(std::string("unparseable feed document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vulnerabilities") ||
      !doc["vulnerabilities"].is_array()) {
    throw FeedSchema("feed document lacks a vulnerabilities array");
  }

  IngestStats stats;
  for (const auto& entry : doc["vulnerabilities"]) {
    if (!entry.is_object() || !entry.contains("cve") || !entry["cve"].is_object()) {
      stats.diagnostics.push_back({"Skipped", "entry without a cve object"});
      continue;
    }
    const auto& cve = entry["cve"];
    std::string id = cve.value("id", "");
    if (id.empty()) {
      stats.diagnostics.push_back({"Skipped", "record without an id"});
      continue;
    }

    CveRecord record;
    record.id = id;
    record.published_year = year_from_record(cve, id);
    if (years && !years->contains(record.published_year)) {
      ++stats.records_year_filtered;
      continue;
    }
    record.description = english_description(cve);
    record.cvss_base = pick_cvss(cve);
    record.cwe_ids = cwe_ids(cve);

    if (cve.contains("configurations") && cve["configurations"].is_array()) {
      for (const auto& config : cve["configurations"]) {
        if (!config.contains("nodes") || !config["nodes"].is_array()) continue;
        for (const auto& node : config["nodes"]) {
          if (!node.contains("cpeMatch") || !node["cpeMatch"].is_array()) continue;
          for (const auto& match : node["cpeMatch"]) {
            if (!match.contains("criteria") || !match["criteria"].is_string()) continue;
            MatchCriterion criterion;
            try {
              criterion.cpe = parse_cpe(match["criteria"].get<std::string>());
            } catch (const MalformedCpe& e) {
              stats.diagnostics.push_back({"BadCriterion", id + ": " + e.what()});
              continue;
            }
            criterion.version_start =
                bound(match, "versionStartIncluding", "versionStartExcluding");
            criterion.version_end = bound(match, "versionEndIncluding", "versionEndExcluding");
            if (criterion.version_start && criterion.version_end &&
                version_compare(criterion.version_start->version,
                                criterion.version_end->version) == VersionOrder::GT) {
              stats.diagnostics.push_back({"BadCriterion", id + ": start > end"});
              continue;
            }
            record.criteria.push_back(std::move(criterion));
          }
        }
      }
    }

    YearCounts& counts = stats.inventory_delta.per_year[record.published_year];
    ++counts.total;
    if (record.usable()) ++counts.usable;
    records_[id] = std::move(record);
    ++stats.records_added;
  }
  return stats;
}

std::vector<std::pair<const CveRecord*, MatchKind>> VulnStore::match_component(
    const CpeIdentifier& cpe) const {
  if (records_.empty()) throw EmptyStore();

  std::vector<std::pair<const CveRecord*, MatchKind>> out;
  for (const auto& [id, record] : records_) {
    bool matched = false;
    for (const MatchCriterion& criterion : record.criteria) {
      if (criterion_matches(criterion, cpe)) {
        matched = true;
        break;
      }
    }
    if (matched) {
      out.emplace_back(&record, MatchKind::CpeRange);
      continue;
    }
    // Description fallback: only for records with no applicability data.
    if (record.criteria.empty() && cpe.product != "*" && cpe.version != "*" &&
        contains_ci(record.description, cpe.product) &&
        contains_ci(record.description, cpe.version)) {
      out.emplace_back(&record, MatchKind::Description);
    }
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    double ca = a.first->cvss_base.value_or(-1.0);
    double cb = b.first->cvss_base.value_or(-1.0);
    if (ca != cb) return ca > cb;
    return a.first->id < b.first->id;
  });
  return out;
}

ScanResult VulnStore::scan_registry(const ComponentRegistry& registry) const {
  ScanResult result;
  std::set<std::string> unique_ids;
  for (const Component& component : registry.components) {
    ComponentScan scan;
    scan.block_name = component.block_name;
    bool any_cvss = false;
    for (const auto& [record, kind] : match_component(component.cpe)) {
      scan.matches.push_back({record->id, kind, record->cvss_base});
      unique_ids.insert(record->id);
      if (record->cvss_base) {
        any_cvss = true;
        scan.max_cvss = std::max(scan.max_cvss, *record->cvss_base);
      }
    }
    scan.cvss_missing = !scan.matches.empty() && !any_cvss;
    result.components.push_back(std::move(scan));
  }
  result.unique_cve_count = unique_ids.size();
  return result;
}

FeedInventory VulnStore::inventory() const {
  FeedInventory inv;
  for (const auto& [id, record] : records_) {
    YearCounts& counts = inv.per_year[record.published_year];
    ++counts.total;
    if (record.usable()) ++counts.usable;
  }
  return inv;
}

const CveRecord* VulnStore::find(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<const CveRecord*> VulnStore::records_sorted() const {
  std::vector<const CveRecord*> out;
  out.reserve(records_.size());
  for (const auto& [id, record] : records_) out.push_back(&record);
  return out;
}

nlohmann::ordered_json VulnStore::to_snapshot() const {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& [id, record] : records_) {
    nlohmann::ordered_json criteria = nlohmann::ordered_json::array();
    for (const MatchCriterion& c : record.criteria) {
      nlohmann::ordered_json item{{"criteria", c.cpe.to_string()}};
      if (c.version_start) {
        item[c.version_start->inclusive ? "versionStartIncluding" : "versionStartExcluding"] =
            c.version_start->version;
      }
      if (c.version_end) {
        item[c.version_end->inclusive ? "versionEndIncluding" : "versionEndExcluding"] =
            c.version_end->version;
      }
      criteria.push_back(std::move(item));
    }
    nlohmann::ordered_json rec{{"id", record.id},
                               {"description", record.description},
                               {"cvss_base", nullptr},
                               {"cwe_ids", record.cwe_ids},
                               {"criteria", std::move(criteria)},
                               {"published_year", record.published_year}};
    if (record.cvss_base) rec["cvss_base"] = *record.cvss_base;
    records.push_back(std::move(rec));
  }
  return {{"records", std::move(records)}};
}

VulnStore VulnStore::from_snapshot(const nlohmann::json& doc) {
  VulnStore store;
  for (const auto& rec : doc.at("records")) {
    CveRecord record;
    record.id = rec.at("id").get<std::string>();
    record.description = rec.at("description").get<std::string>();
    if (!rec.at("cvss_base").is_null()) record.cvss_base = rec.at("cvss_base").get<double>();
    record.cwe_ids = rec.at("cwe_ids").get<std::vector<std::string>>();
    record.published_year = rec.at("published_year").get<int>();
    for (const auto& item : rec.at("criteria")) {
      MatchCriterion criterion;
      criterion.cpe = parse_cpe(item.at("criteria").get<std::string>());
      if (item.contains("versionStartIncluding")) {
        criterion.version_start =
            VersionBound{item["versionStartIncluding"].get<std::string>(), true};
      } else if (item.contains("versionStartExcluding")) {
        criterion.version_start =
            VersionBound{item["versionStartExcluding"].get<std::string>(), false};
      }
      if (item.contains("versionEndIncluding")) {
        criterion.version_end =
            VersionBound{item["versionEndIncluding"].get<std::string>(), true};
      } else if (item.contains("versionEndExcluding")) {
        criterion.version_end =
            VersionBound{item["versionEndExcluding"].get<std::string>(), false};
      }
      record.criteria.push_back(std::move(criterion));
    }
    store.records_[record.id] = std::move(record);
  }
  return store;
}

}  // namespace archsec
