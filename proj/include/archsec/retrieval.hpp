#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace archsec {

struct EmptyCorpus : std::runtime_error {
  EmptyCorpus() : std::runtime_error("corpus is empty") {}
};

struct UnknownCandidate : std::runtime_error {
  explicit UnknownCandidate(const std::string& id)
      : std::runtime_error("candidate not indexed: " + id) {}
};

struct ScoreSchema : std::runtime_error {
  explicit ScoreSchema(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteScore : std::runtime_error {
  NonFiniteScore(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  size_t line;
};

/// Lowercase terms split on any non-alphanumeric byte; terms shorter than
/// two characters are dropped.
std::vector<std::string> tokenize(const std::string& text);

struct RankedEntry {
  std::string candidate_id;
  double score = 0.0;
  size_t rank = 0;     // 1-based
  bool scored = true;  // false for sentinel-ranked candidates without a score
};

/// Ordered retrieval result: scores non-increasing, ranks 1..n, unique ids.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;

  void truncate(size_t k);
};

using SparseVector = std::vector<std::pair<size_t, double>>;  // sorted by index

/// TF-IDF index over a fixed corpus. Term frequency is the raw count,
/// idf(t) = ln((N+1)/(df(t)+1)) + 1, document vectors are L2-normalized.
/// The vocabulary is frozen after fitting; out-of-vocabulary query terms
/// are dropped.
class TfidfIndex {
 public:
  static TfidfIndex fit(const std::vector<std::pair<std::string, std::string>>& corpus);

  /// Cosine scores of the query text against the given candidate documents,
  /// sorted score-descending with ties broken by ascending candidate id.
  RankedList score_query(const std::string& query_text,
                         const std::vector<std::string>& candidates,
                         const std::string& query_id = "") const;

  /// Cosine between two indexed documents.
  double doc_cosine(const std::string& doc_a, const std::string& doc_b) const;

  bool has_doc(const std::string& doc_id) const { return docs_.count(doc_id) > 0; }
  std::optional<double> idf(const std::string& term) const;
  size_t vocabulary_size() const { return vocabulary_.size(); }
  size_t doc_count() const { return docs_.size(); }

 private:
  SparseVector vectorize(const std::string& text) const;

  std::map<std::string, size_t> vocabulary_;
  std::vector<double> idf_;
  std::map<std::string, SparseVector> docs_;
};

/// Scores produced outside the artifact (dense encoders, LLMs), keyed by
/// (query_id, candidate_id).
struct ExternalScoreSet {
  std::string model_name;
  std::map<std::pair<std::string, std::string>, double> scores;

  std::vector<std::string> candidate_ids() const;  // distinct, sorted
  std::vector<std::string> query_ids() const;      // distinct, sorted
};

struct ExternalLoadResult {
  ExternalScoreSet set;
  std::vector<std::string> warnings;
};

/// Reads the comma-separated score format with header
/// `model,query_id,candidate_id,score`. Duplicate (query, candidate) rows
/// overwrite with a warning; non-finite scores throw NonFiniteScore with the
/// offending line number.
ExternalLoadResult load_external_scores(std::istream& in);

/// Ranks candidates by external score. Candidates without a score get a
/// negative-infinity sentinel, rank after every scored candidate and are
/// flagged via RankedEntry::scored.
RankedList rank_from_external(const ExternalScoreSet& set, const std::string& query_id,
                              const std::vector<std::string>& candidates);

}  // namespace archsec
