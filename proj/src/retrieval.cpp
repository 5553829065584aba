#include "archsec/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

namespace archsec {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> terms;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) terms.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return terms;
}

void RankedList::truncate(size_t k) {
  if (entries.size() > k) entries.resize(k);
}

namespace {

void assign_ranks(RankedList& list) {
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.candidate_id < b.candidate_id;
            });
  for (size_t i = 0; i < list.entries.size(); ++i) list.entries[i].rank = i + 1;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      sum += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return sum;
}

void normalize(SparseVector& v) {
  double norm_sq = 0.0;
  for (const auto& [index, weight] : v) norm_sq += weight * weight;
  if (norm_sq <= 0.0) return;  // empty document stays the zero vector
  double norm = std::sqrt(norm_sq);
  for (auto& [index, weight] : v) weight /= norm;
}

}  // namespace

TfidfIndex TfidfIndex::fit(const std::vector<std::pair<std::string, std::string>>& corpus) {
  if (corpus.empty()) throw EmptyCorpus();

  TfidfIndex index;
  std::vector<std::map<std::string, size_t>> counts;
  counts.reserve(corpus.size());
  std::map<std::string, size_t> df;
  for (const auto& [doc_id, text] : corpus) {
    std::map<std::string, size_t> tf;
    for (const std::string& term : tokenize(text)) ++tf[term];
    for (const auto& [term, count] : tf) ++df[term];
    counts.push_back(std::move(tf));
  }

  const double n_docs = static_cast<double>(corpus.size());
  for (const auto& [term, doc_freq] : df) {
    index.vocabulary_[term] = index.idf_.size();
    index.idf_.push_back(std::log((n_docs + 1.0) / (static_cast<double>(doc_freq) + 1.0)) + 1.0);
  }

  for (size_t d = 0; d < corpus.size(); ++d) {
    SparseVector vec;
    vec.reserve(counts[d].size());
    for (const auto& [term, count] : counts[d]) {
      size_t col = index.vocabulary_.at(term);
      vec.emplace_back(col, static_cast<double>(count) * index.idf_[col]);
    }
    std::sort(vec.begin(), vec.end());
    normalize(vec);
    index.docs_[corpus[d].first] = std::move(vec);
  }
  return index;
}

SparseVector TfidfIndex::vectorize(const std::string& text) const {
  std::map<size_t, double> weights;
  for (const std::string& term : tokenize(text)) {
    auto it = vocabulary_.find(term);
    if (it == vocabulary_.end()) continue;  // out-of-vocabulary terms dropped
    weights[it->second] += idf_[it->second];
  }
  SparseVector vec(weights.begin(), weights.end());
  normalize(vec);
  return vec;
}

RankedList TfidfIndex::score_query(const std::string& query_text,
                                   const std::vector<std::string>& candidates,
                                   const std::string& query_id) const {
  SparseVector query = vectorize(query_text);

  RankedList list;
  list.query_id = query_id;
  std::set<std::string> seen;
  for (const std::string& candidate : candidates) {
    if (!seen.insert(candidate).second) continue;
    auto it = docs_.find(candidate);
    if (it == docs_.end()) throw UnknownCandidate(candidate);
    list.entries.push_back({candidate, dot(query, it->second), 0, true});
  }
  assign_ranks(list);
  return list;
}

double TfidfIndex::doc_cosine(const std::string& doc_a, const std::string& doc_b) const {
  auto a = docs_.find(doc_a);
  if (a == docs_.end()) throw UnknownCandidate(doc_a);
  auto b = docs_.find(doc_b);
  if (b == docs_.end()) throw UnknownCandidate(doc_b);
  return dot(a->second, b->second);
}

std::optional<double> TfidfIndex::idf(const std::string& term) const {
  auto it = vocabulary_.find(term);
  if (it == vocabulary_.end()) return std::nullopt;
  return idf_[it->second];
}

std::vector<std::string> ExternalScoreSet::candidate_ids() const {
  std::set<std::string> out;
  for (const auto& [key, score] : scores) out.insert(key.second);
  return {out.begin(), out.end()};
}

std::vector<std::string> ExternalScoreSet::query_ids() const {
  std::set<std::string> out;
  for (const auto& [key, score] : scores) out.insert(key.first);
  return {out.begin(), out.end()};
}

ExternalLoadResult load_external_scores(std::istream& in) {
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  std::string line;
  if (!std::getline(in, line)) throw ScoreSchema("empty score file");
  strip_cr(line);
  if (line != "model,query_id,candidate_id,score") {
    throw ScoreSchema("bad header: " + line);
  }

  ExternalLoadResult result;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    size_t start = 0;
    for (size_t pos = line.find(','); pos != std::string::npos; pos = line.find(',', start)) {
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 4) {
      throw ScoreSchema("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }

    double score;
    try {
      size_t used = 0;
      score = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument(fields[3]);
    } catch (const std::exception&) {
      throw ScoreSchema("line " + std::to_string(line_no) + ": bad score '" + fields[3] + "'");
    }
    if (!std::isfinite(score)) {
      throw NonFiniteScore(line_no, "non-finite score '" + fields[3] + "'");
    }

    if (result.set.model_name.empty()) result.set.model_name = fields[0];
    auto key = std::make_pair(fields[1], fields[2]);
    auto [it, inserted] = result.set.scores.emplace(key, score);
    if (!inserted) {
      it->second = score;  // last value wins
      result.warnings.push_back("line " + std::to_string(line_no) + ": duplicate pair (" +
                                fields[1] + ", " + fields[2] + ") overwritten");
    }
  }
  if (result.set.model_name.empty()) throw ScoreSchema("score file has no data rows");
  return result;
}

RankedList rank_from_external(const ExternalScoreSet& set, const std::string& query_id,
                              const std::vector<std::string>& candidates) {
  RankedList list;
  list.query_id = query_id;
  std::set<std::string> seen;
  for (const std::string& candidate : candidates) {
    if (!seen.insert(candidate).second) continue;
    auto it = set.scores.find({query_id, candidate});
    if (it != set.scores.end()) {
      list.entries.push_back({candidate, it->second, 0, true});
    } else {
      list.entries.push_back(
          {candidate, -std::numeric_limits<double>::infinity(), 0, false});
    }
  }
  assign_ranks(list);
  return list;
}

}  // namespace archsec
