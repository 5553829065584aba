#include "archsec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace archsec {

std::pair<std::vector<GroundTruthPair>, std::vector<GroundTruthPair>> grouped_split(
    const std::vector<GroundTruthPair>& pairs, const SplitSpec& spec) {
  if (spec.test_fraction <= 0.0 || spec.test_fraction >= 1.0) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  auto key_of = [&](const GroundTruthPair& p) -> const std::string& {
    return spec.group_key == GroupKey::CveId ? p.cve_id : p.technique_id;
  };

  std::set<std::string> distinct;
  for (const GroundTruthPair& p : pairs) distinct.insert(key_of(p));
  if (distinct.size() < 2) throw DegenerateSplit();

  // Deterministic Fisher-Yates over the sorted keys; std::shuffle is
  // implementation-defined, this is not.
  std::vector<std::string> groups(distinct.begin(), distinct.end());
  std::mt19937_64 rng(spec.seed);
  for (size_t i = groups.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng() % (i + 1));
    std::swap(groups[i], groups[j]);
  }

  double raw = spec.test_fraction * static_cast<double>(groups.size());
  size_t n_test = static_cast<size_t>(std::ceil(raw - 1e-9));
  n_test = std::clamp<size_t>(n_test, 1, groups.size());

  std::set<std::string> test_groups(groups.begin(), groups.begin() + n_test);
  std::vector<GroundTruthPair> train, test;
  for (const GroundTruthPair& p : pairs) {
    (test_groups.count(key_of(p)) ? test : train).push_back(p);
  }
  return {std::move(train), std::move(test)};
}

namespace {

// Rank of the first relevant candidate, or 0 when none is ranked.
size_t first_relevant_rank(const EvalQuery& query) {
  for (const RankedEntry& entry : query.ranked.entries) {
    if (query.truth.count(entry.candidate_id)) return entry.rank;
  }
  return 0;
}

}  // namespace

double mrr(const std::vector<EvalQuery>& queries) {
  if (queries.empty()) throw EmptyQuerySet();
  double sum = 0.0;
  for (const EvalQuery& query : queries) {
    size_t rank = first_relevant_rank(query);
    if (rank > 0) sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(queries.size());
}

double hits_at_k(const std::vector<EvalQuery>& queries, size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (queries.empty()) throw EmptyQuerySet();
  size_t hits = 0;
  for (const EvalQuery& query : queries) {
    size_t rank = first_relevant_rank(query);
    if (rank >= 1 && rank <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

HitRateRecall hit_rate_recall_at_k(const std::vector<EvalQuery>& queries, size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (queries.empty()) throw EmptyQuerySet();
  size_t recovered = 0, truth_total = 0;
  for (const EvalQuery& query : queries) {
    for (const RankedEntry& entry : query.ranked.entries) {
      if (entry.rank > k) break;
      if (query.truth.count(entry.candidate_id)) ++recovered;
    }
    truth_total += query.truth.size();
  }
  HitRateRecall out;
  out.hit_rate = hits_at_k(queries, k);
  out.recall = truth_total == 0
                   ? 0.0
                   : static_cast<double>(recovered) / static_cast<double>(truth_total);
  return out;
}

RetrievalReport retrieval_report(const std::vector<EvalQuery>& queries) {
  RetrievalReport report;
  report.mrr = mrr(queries);
  for (size_t k : {1, 3, 5, 10}) report.hits_at[k] = hits_at_k(queries, k);
  report.n_queries = queries.size();
  return report;
}

MultiLabelReport multilabel_metrics(const ScoreMatrix& scores, const LabelMatrix& labels,
                                    double threshold) {
  const size_t rows = scores.row_ids.size();
  const size_t cols = scores.col_ids.size();
  if (rows != labels.row_ids.size() || cols != labels.col_ids.size() ||
      scores.values.size() != rows * cols || labels.values.size() != rows * cols) {
    throw ShapeMismatch();
  }

  MultiLabelReport report;
  report.threshold = threshold;

  size_t tp = 0, fp = 0, fn = 0;
  double macro_sum = 0.0;
  size_t macro_classes = 0;
  for (size_t c = 0; c < cols; ++c) {
    size_t ctp = 0, cfp = 0, cfn = 0, support = 0;
    for (size_t r = 0; r < rows; ++r) {
      bool predicted = scores.at(r, c) >= threshold;
      bool actual = labels.at(r, c);
      if (actual) ++support;
      if (predicted && actual) ++ctp;
      if (predicted && !actual) ++cfp;
      if (!predicted && actual) ++cfn;
    }
    tp += ctp;
    fp += cfp;
    fn += cfn;
    double f1 = (2 * ctp + cfp + cfn) == 0
                    ? 0.0
                    : 2.0 * static_cast<double>(ctp) / static_cast<double>(2 * ctp + cfp + cfn);
    report.per_class_f1[scores.col_ids[c]] = f1;
    if (support > 0) {  // zero-support classes are excluded from the macro mean
      macro_sum += f1;
      ++macro_classes;
    }
  }

  report.micro_p = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  report.micro_r = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  report.micro_f1 = (report.micro_p + report.micro_r) == 0.0
                        ? 0.0
                        : 2.0 * report.micro_p * report.micro_r /
                              (report.micro_p + report.micro_r);
  report.macro_f1 = macro_classes == 0 ? 0.0 : macro_sum / static_cast<double>(macro_classes);
  report.hamming_loss = rows * cols == 0
                            ? 0.0
                            : static_cast<double>(fp + fn) / static_cast<double>(rows * cols);
  return report;
}

std::pair<double, MultiLabelReport> threshold_sweep(const ScoreMatrix& scores,
                                                    const LabelMatrix& labels) {
  double best_threshold = kSweepThresholds.front();
  MultiLabelReport best;
  bool first = true;
  for (double threshold : kSweepThresholds) {
    MultiLabelReport report = multilabel_metrics(scores, labels, threshold);
    if (first || report.micro_f1 > best.micro_f1) {
      best = report;
      best_threshold = threshold;
      first = false;
    }
  }
  return {best_threshold, best};
}

PearsonResult pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw LengthMismatch();
  if (a.size() < 2) throw TooShort();

  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;

  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - mean_a;
    double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return {0.0, true};
  return {cov / std::sqrt(var_a * var_b), false};
}

std::pair<std::vector<double>, std::vector<double>> align_score_sets(
    const ExternalScoreSet& a, const ExternalScoreSet& b) {
  std::vector<double> va, vb;
  // Both maps iterate lexicographically; walk the intersection.
  for (const auto& [key, score] : a.scores) {
    auto it = b.scores.find(key);
    if (it == b.scores.end()) continue;
    va.push_back(score);
    vb.push_back(it->second);
  }
  return {std::move(va), std::move(vb)};
}

}  // namespace archsec
