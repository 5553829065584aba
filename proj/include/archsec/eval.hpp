#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "archsec/kb.hpp"
#include "archsec/retrieval.hpp"

namespace archsec {

struct EmptyQuerySet : std::runtime_error {
  EmptyQuerySet() : std::runtime_error("query set is empty") {}
};

struct DegenerateSplit : std::runtime_error {
  DegenerateSplit() : std::runtime_error("fewer than 2 groups to split") {}
};

struct ShapeMismatch : std::runtime_error {
  ShapeMismatch() : std::runtime_error("score and label matrices differ in shape") {}
};

struct LengthMismatch : std::runtime_error {
  LengthMismatch() : std::runtime_error("vectors differ in length") {}
};

struct TooShort : std::runtime_error {
  TooShort() : std::runtime_error("need at least 2 aligned scores") {}
};

/// One evaluation unit: a query, its relevant candidate set, and a ranking.
struct EvalQuery {
  std::string query_id;
  std::set<std::string> truth;
  RankedList ranked;
};

struct RetrievalReport {
  double mrr = 0.0;
  std::map<size_t, double> hits_at;  // K in {1, 3, 5, 10}
  size_t n_queries = 0;
};

struct MultiLabelReport {
  double threshold = 0.0;
  double micro_p = 0.0;
  double micro_r = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double hamming_loss = 0.0;
  std::map<std::string, double> per_class_f1;
};

enum class GroupKey { CveId, TechniqueId };

struct SplitSpec {
  double test_fraction = 0.2;  // in (0, 1)
  std::uint64_t seed = 0;
  GroupKey group_key = GroupKey::CveId;
};

/// Group-aware split: distinct key values are shuffled by a seeded PRNG and
/// the first ceil(fraction * n_groups) groups form the test side; all pairs
/// of a group travel together. Throws DegenerateSplit below 2 groups.
std::pair<std::vector<GroundTruthPair>, std::vector<GroundTruthPair>> grouped_split(
    const std::vector<GroundTruthPair>& pairs, const SplitSpec& spec);

/// Mean reciprocal rank of the first relevant candidate; queries whose truth
/// never appears contribute 0.
double mrr(const std::vector<EvalQuery>& queries);

/// Fraction of queries with at least one relevant candidate in the top k.
double hits_at_k(const std::vector<EvalQuery>& queries, size_t k);

struct HitRateRecall {
  double hit_rate = 0.0;
  double recall = 0.0;
};

/// hit_rate is hits_at_k; recall pools |truth ∩ top-k| over |truth|.
HitRateRecall hit_rate_recall_at_k(const std::vector<EvalQuery>& queries, size_t k);

RetrievalReport retrieval_report(const std::vector<EvalQuery>& queries);

/// Dense row-major matrix with stable row/column ids.
struct ScoreMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<double> values;  // rows * cols

  double at(size_t row, size_t col) const { return values[row * col_ids.size() + col]; }
  double& at(size_t row, size_t col) { return values[row * col_ids.size() + col]; }
};

struct LabelMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<std::uint8_t> values;

  bool at(size_t row, size_t col) const { return values[row * col_ids.size() + col] != 0; }
};

/// Multi-label metrics at one threshold (prediction = score >= threshold).
/// Micro metrics pool TP/FP/FN over all cells; macro F1 averages per-class
/// F1 over classes with positive support (zero-support classes excluded);
/// hamming is the fraction of misclassified cells.
MultiLabelReport multilabel_metrics(const ScoreMatrix& scores, const LabelMatrix& labels,
                                    double threshold);

inline constexpr std::array<double, 18> kSweepThresholds = {
    0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50,
    0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

/// Evaluates every sweep threshold and returns the one maximizing micro F1,
/// ties broken by the lower threshold.
std::pair<double, MultiLabelReport> threshold_sweep(const ScoreMatrix& scores,
                                                    const LabelMatrix& labels);

struct PearsonResult {
  double r = 0.0;
  bool undefined = false;  // either vector has zero variance
};

PearsonResult pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Aligns two score sets on the intersection of their scored (query,
/// candidate) pairs, sorted lexicographically.
std::pair<std::vector<double>, std::vector<double>> align_score_sets(
    const ExternalScoreSet& a, const ExternalScoreSet& b);

}  // namespace archsec
