// archsec: SysML architecture model -> CVEs -> adversary techniques ->
// prioritized NIST 800-53 controls, plus the evaluation harness.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include "archsec/eval.hpp"
#include "archsec/llm.hpp"
#include "archsec/pipeline.hpp"
#include "archsec/report.hpp"

namespace fs = std::filesystem;
using namespace archsec;

namespace {

std::optional<YearRange> parse_years(const std::string& text) {
  if (text.empty()) return std::nullopt;
  YearRange range;
  size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      range.first = range.last = std::stoi(text);
    } else {
      range.first = std::stoi(text.substr(0, dots));
      range.last = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--years", "expected YYYY or YYYY..YYYY, got '" + text + "'");
  }
  if (range.first > range.last) {
    throw CLI::ValidationError("--years", "range start exceeds end");
  }
  return range;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

// Ground truth for the evaluator: plain (query, candidate) pairs. Unlike the
// knowledge-base loader this applies no technique-id validation, so synthetic
// benchmarks can use arbitrary candidate ids.
std::map<std::string, std::set<std::string>> load_truth(const fs::path& path) {
  nlohmann::json doc = nlohmann::json::parse(read_file(path));
  std::map<std::string, std::set<std::string>> truth;
  for (const auto& item : doc) {
    truth[item.at("cve_id").get<std::string>()].insert(
        item.at("technique_id").get<std::string>());
  }
  return truth;
}

struct EvaluatedModel {
  std::string name;
  std::vector<EvalQuery> queries;
  ExternalScoreSet scores;  // kept for cross-model correlation
};

nlohmann::ordered_json metrics_json(const EvaluatedModel& model,
                                    const std::map<std::string, std::set<std::string>>& truth) {
  RetrievalReport ranked = retrieval_report(model.queries);
  HitRateRecall hr1 = hit_rate_recall_at_k(model.queries, 1);
  HitRateRecall hr5 = hit_rate_recall_at_k(model.queries, 5);

  std::vector<std::string> universe = model.scores.candidate_ids();
  ScoreMatrix scores;
  LabelMatrix labels;
  scores.col_ids = universe;
  labels.col_ids = universe;
  for (const EvalQuery& q : model.queries) {
    scores.row_ids.push_back(q.query_id);
    labels.row_ids.push_back(q.query_id);
    std::map<std::string, double> row;
    for (const RankedEntry& e : q.ranked.entries) {
      if (e.scored) row[e.candidate_id] = e.score;
    }
    const std::set<std::string>& positives = truth.at(q.query_id);
    for (const std::string& candidate : universe) {
      auto it = row.find(candidate);
      scores.values.push_back(it == row.end() ? 0.0 : it->second);
      labels.values.push_back(positives.count(candidate) ? 1 : 0);
    }
  }
  auto [threshold, multilabel] = threshold_sweep(scores, labels);

  return {{"model", model.name},
          {"n_queries", model.queries.size()},
          {"mrr", ranked.mrr},
          {"h1", ranked.hits_at.at(1)},
          {"h3", ranked.hits_at.at(3)},
          {"h5", ranked.hits_at.at(5)},
          {"h10", ranked.hits_at.at(10)},
          {"hr1", hr1.hit_rate},
          {"hr5", hr5.hit_rate},
          {"r5", hr5.recall},
          {"micro_f1", multilabel.micro_f1},
          {"macro_f1", multilabel.macro_f1},
          {"hamming", multilabel.hamming_loss},
          {"threshold", threshold}};
}

int run(int argc, char** argv) {
  CLI::App app{"Architecture-driven vulnerability-to-control tracing"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Build the vulnerability store from NVD feeds");
  std::string in_feeds, in_years, in_out;
  ingest->add_option("--feeds", in_feeds, "Directory of *.json feed files")->required();
  ingest->add_option("--years", in_years, "Publication year filter, YYYY or YYYY..YYYY");
  ingest->add_option("--out", in_out, "Store snapshot path")->required();

  auto* scan = app.add_subcommand("scan", "Match SysML components against the store");
  std::string sc_model, sc_feeds, sc_store, sc_years, sc_out, sc_registry_out;
  scan->add_option("--model", sc_model, "SysML XML model")->required();
  scan->add_option("--feeds", sc_feeds, "Directory of *.json feed files");
  scan->add_option("--store", sc_store, "Previously written store snapshot");
  scan->add_option("--years", sc_years, "Publication year filter");
  scan->add_option("--registry-out", sc_registry_out, "Also write the parsed registry");
  scan->add_option("--out", sc_out, "Scan result path")->required();

  auto* map_cmd = app.add_subcommand("map", "Rank techniques per scanned CVE");
  std::string mp_scan, mp_store, mp_kb, mp_model, mp_method = "tfidf", mp_out;
  std::string mp_prompts = "prompts", mp_responses = "responses", mp_llm_model = "local-model";
  size_t mp_top_k = 10;
  map_cmd->add_option("--scan", mp_scan, "Scan result JSON")->required();
  map_cmd->add_option("--store", mp_store, "Store snapshot")->required();
  map_cmd->add_option("--kb", mp_kb, "Catalog directory")->required();
  map_cmd->add_option("--model", mp_model, "SysML model (system profile for the vectorizer)")
      ->required();
  map_cmd->add_option("--method", mp_method, "tfidf | external:<score file> | llm | llm-http");
  map_cmd->add_option("--top-k", mp_top_k, "Techniques kept per CVE");
  map_cmd->add_option("--prompts", mp_prompts, "Prompt directory (llm file mode)");
  map_cmd->add_option("--responses", mp_responses, "Response directory (llm file mode)");
  map_cmd->add_option("--llm-model", mp_llm_model, "Model name (llm-http mode)");
  map_cmd->add_option("--out", mp_out, "Predictions path")->required();

  auto* recommend = app.add_subcommand("recommend", "Score controls for predicted techniques");
  std::string rc_predictions, rc_kb, rc_model, rc_out;
  size_t rc_top_k = 10;
  recommend->add_option("--predictions", rc_predictions, "Predictions JSON")->required();
  recommend->add_option("--kb", rc_kb, "Catalog directory")->required();
  recommend->add_option("--model", rc_model, "SysML model (system profile)")->required();
  recommend->add_option("--top-k", rc_top_k, "Techniques considered per CVE");
  recommend->add_option("--out", rc_out, "Recommendations path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score mapping models against ground truth");
  std::string ev_truth, ev_kb, ev_store, ev_model, ev_out;
  std::vector<std::string> ev_scores;
  bool ev_tfidf = false;
  evaluate->add_option("--truth", ev_truth, "Ground-truth pair JSON")->required();
  evaluate->add_option("--scores", ev_scores, "External score file (repeatable)");
  evaluate->add_flag("--tfidf", ev_tfidf, "Also evaluate the in-core TF-IDF mapper");
  evaluate->add_option("--kb", ev_kb, "Catalog directory (needed for --tfidf)");
  evaluate->add_option("--store", ev_store, "Store snapshot (needed for --tfidf)");
  evaluate->add_option("--model", ev_model, "SysML model (needed for --tfidf)");
  evaluate->add_option("--out", ev_out, "Metrics path")->required();

  auto* report = app.add_subcommand("report", "Run the full pipeline and emit the trace report");
  std::string rp_model, rp_feeds, rp_kb, rp_years, rp_method = "tfidf", rp_format = "json",
              rp_out;
  size_t rp_top_k = 10, rp_top_m = 10;
  report->add_option("--model", rp_model, "SysML XML model")->required();
  report->add_option("--feeds", rp_feeds, "Directory of *.json feed files")->required();
  report->add_option("--kb", rp_kb, "Catalog directory")->required();
  report->add_option("--years", rp_years, "Publication year filter");
  report->add_option("--method", rp_method, "tfidf | external:<score file>");
  report->add_option("--top-k", rp_top_k, "Techniques kept per CVE");
  report->add_option("--top-m", rp_top_m, "Controls kept per technique");
  report->add_option("--format", rp_format, "json | md");
  report->add_option("--out", rp_out, "Report path")->required();

  auto* hist = app.add_subcommand("hist", "Priority histogram from a JSON report");
  std::string hs_report, hs_out;
  double hs_clip = 99.0;
  size_t hs_bins = 50;
  hist->add_option("--report", hs_report, "JSON report")->required();
  hist->add_option("--clip", hs_clip, "Clip percentile");
  hist->add_option("--bins", hs_bins, "Bin count");
  hist->add_option("--out", hs_out, "Histogram path")->required();

  CLI11_PARSE(app, argc, argv);

  if (*ingest) {
    VulnStore store;
    std::vector<IngestStats> stats = load_feed_dir(store, in_feeds, parse_years(in_years));
    size_t added = 0, diags = 0;
    for (const IngestStats& s : stats) {
      added += s.records_added;
      for (const FeedDiagnostic& d : s.diagnostics) {
        std::cerr << d.code << ": " << d.detail << "\n";
        ++diags;
      }
    }
    write_json(in_out, store.to_snapshot());
    std::cout << "ingested " << added << " records (" << diags << " diagnostics), store has "
              << store.size() << "\n";
    for (const auto& [year, counts] : store.inventory().per_year) {
      std::cout << year << ": total " << counts.total << ", usable " << counts.usable << "\n";
    }
    return 0;
  }

  if (*scan) {
    if (sc_feeds.empty() == sc_store.empty()) {
      std::cerr << "scan: exactly one of --feeds or --store is required\n";
      return 1;
    }
    SysmlParseResult model = parse_sysml(read_file(sc_model));
    for (const ModelDiagnostic& d : model.diagnostics) {
      std::cerr << d.code << ": " << d.detail << "\n";
    }
    VulnStore store;
    if (!sc_feeds.empty()) {
      load_feed_dir(store, sc_feeds, parse_years(sc_years));
    } else {
      store = VulnStore::from_snapshot(nlohmann::json::parse(read_file(sc_store)));
    }
    ScanResult result = store.scan_registry(model.registry);
    if (!sc_registry_out.empty()) write_json(sc_registry_out, registry_to_json(model.registry));
    write_json(sc_out, scan_to_json(result, model.registry));
    std::cout << "unique CVEs: " << result.unique_cve_count << "\n";
    return 0;
  }

  if (*map_cmd) {
    KnowledgeBase kb = KnowledgeBase::load_dir(mp_kb);
    VulnStore store = VulnStore::from_snapshot(nlohmann::json::parse(read_file(mp_store)));
    ComponentRegistry registry = parse_sysml(read_file(mp_model)).registry;

    // The scanned CVE set drives which records get mapped.
    nlohmann::json scan_doc = nlohmann::json::parse(read_file(mp_scan));
    std::set<std::string> ids;
    for (const auto& component : scan_doc.at("components")) {
      for (const auto& match : component.at("matches")) {
        ids.insert(match.at("cve_id").get<std::string>());
      }
    }
    std::vector<const CveRecord*> records;
    for (const std::string& id : ids) {
      const CveRecord* record = store.find(id);
      if (record) records.push_back(record);
    }

    std::vector<TechniquePrediction> predictions;
    std::vector<std::string> notes;
    if (mp_method == "llm" || mp_method == "llm-http") {
      std::unique_ptr<LlmTransport> transport;
      if (mp_method == "llm") {
        transport = std::make_unique<FileTransport>(mp_prompts, mp_responses);
      } else {
        const char* base = std::getenv("ARCHSEC_LLM_URL");
        if (!base) {
          std::cerr << "llm-http mode needs ARCHSEC_LLM_URL\n";
          return 1;
        }
        transport = std::make_unique<HttpTransport>(base, mp_llm_model);
      }
      std::vector<Technique> catalog = kb.parent_techniques();
      std::set<std::string> catalog_ids;
      for (const Technique& t : catalog) catalog_ids.insert(t.id);
      for (const CveRecord* record : records) {
        LlmPrompt prompt =
            build_llm_prompt(*record, catalog, kb.derive_hint_techniques(record->cwe_ids));
        std::optional<std::string> response = transport->complete(prompt);
        if (!response) {
          notes.push_back(record->id + ": no response available");
          continue;
        }
        try {
          std::vector<std::string> techniques = parse_llm_response(*response, catalog_ids);
          TechniquePrediction p;
          p.cve_id = record->id;
          p.method = mp_method == "llm" ? "llm:files" : "llm:" + mp_llm_model;
          p.ranked.query_id = record->id;
          for (size_t i = 0; i < techniques.size(); ++i) {
            p.ranked.entries.push_back(
                {techniques[i], 1.0 / static_cast<double>(i + 1), i + 1, true});
          }
          predictions.push_back(std::move(p));
        } catch (const NoParsableArray&) {
          notes.push_back(record->id + ": response had no parsable array");
        }
      }
    } else {
      PipelineConfig config;
      config.method = mp_method;
      config.top_k = mp_top_k;
      predictions = predict_techniques(config, kb, registry, records, notes);
    }
    for (const std::string& note : notes) std::cerr << note << "\n";
    write_json(mp_out, predictions_to_json(predictions));
    std::cout << "mapped " << predictions.size() << " of " << records.size() << " CVEs\n";
    return 0;
  }

  if (*recommend) {
    KnowledgeBase kb = KnowledgeBase::load_dir(rc_kb);
    ComponentRegistry registry = parse_sysml(read_file(rc_model)).registry;
    std::vector<TechniquePrediction> predictions =
        predictions_from_json(nlohmann::json::parse(read_file(rc_predictions)));
    auto controls = recommend_for_predictions(kb, registry, predictions, rc_top_k);
    write_json(rc_out, controls_to_json(controls));
    std::cout << "recommended controls for " << controls.size() << " techniques\n";
    return 0;
  }

  if (*evaluate) {
    auto truth = load_truth(ev_truth);
    if (truth.empty()) {
      std::cerr << "evaluate: ground truth is empty\n";
      return 1;
    }

    std::vector<EvaluatedModel> models;
    for (const std::string& path : ev_scores) {
      std::ifstream in(path);
      if (!in) {
        std::cerr << "cannot open score file " << path << "\n";
        return 1;
      }
      ExternalLoadResult loaded = load_external_scores(in);
      for (const std::string& warning : loaded.warnings) std::cerr << warning << "\n";

      EvaluatedModel model;
      model.name = loaded.set.model_name;
      model.scores = loaded.set;
      std::vector<std::string> universe = loaded.set.candidate_ids();
      for (const auto& [query_id, positives] : truth) {
        EvalQuery q;
        q.query_id = query_id;
        q.truth = positives;
        q.ranked = rank_from_external(loaded.set, query_id, universe);
        model.queries.push_back(std::move(q));
      }
      models.push_back(std::move(model));
    }

    if (ev_tfidf) {
      if (ev_kb.empty() || ev_store.empty() || ev_model.empty()) {
        std::cerr << "evaluate --tfidf needs --kb, --store and --model\n";
        return 1;
      }
      KnowledgeBase kb = KnowledgeBase::load_dir(ev_kb);
      VulnStore store = VulnStore::from_snapshot(nlohmann::json::parse(read_file(ev_store)));
      ComponentRegistry registry = parse_sysml(read_file(ev_model)).registry;

      std::vector<std::pair<std::string, std::string>> sample;
      for (const CveRecord* record : store.records_sorted()) {
        std::string text = clean_text(record->description);
        if (!text.empty()) sample.emplace_back(record->id, std::move(text));
      }
      TechniqueMapper mapper(kb, registry, sample);

      EvaluatedModel model;
      model.name = "tfidf";
      model.scores.model_name = "tfidf";
      for (const auto& [query_id, positives] : truth) {
        const CveRecord* record = store.find(query_id);
        if (!record) {
          std::cerr << query_id << ": not in store, skipped\n";
          continue;
        }
        try {
          TechniquePrediction p = mapper.map_cve(*record, mapper.candidate_ids().size());
          EvalQuery q;
          q.query_id = query_id;
          q.truth = positives;
          q.ranked = p.ranked;
          for (const RankedEntry& e : q.ranked.entries) {
            model.scores.scores[{query_id, e.candidate_id}] = e.score;
          }
          model.queries.push_back(std::move(q));
        } catch (const EmptyDescription&) {
          std::cerr << query_id << ": empty description, skipped\n";
        }
      }
      if (!model.queries.empty()) models.push_back(std::move(model));
    }

    if (models.empty()) {
      std::cerr << "evaluate: nothing to evaluate (give --scores and/or --tfidf)\n";
      return 1;
    }

    nlohmann::ordered_json model_reports = nlohmann::ordered_json::array();
    for (const EvaluatedModel& model : models) {
      model_reports.push_back(metrics_json(model, truth));
    }

    nlohmann::ordered_json correlations = nlohmann::ordered_json::array();
    for (size_t i = 0; i < models.size(); ++i) {
      for (size_t j = i + 1; j < models.size(); ++j) {
        auto [a, b] = align_score_sets(models[i].scores, models[j].scores);
        nlohmann::ordered_json entry{{"model_a", models[i].name},
                                     {"model_b", models[j].name},
                                     {"n", a.size()},
                                     {"r", nullptr},
                                     {"undefined", true}};
        if (a.size() >= 2) {
          PearsonResult r = pearson_correlation(a, b);
          entry["undefined"] = r.undefined;
          if (!r.undefined) entry["r"] = r.r;
        }
        correlations.push_back(std::move(entry));
      }
    }

    write_json(ev_out, {{"models", std::move(model_reports)},
                        {"correlations", std::move(correlations)}});
    std::cout << "evaluated " << models.size() << " model(s)\n";
    return 0;
  }

  if (*report) {
    PipelineConfig config;
    config.model_path = rp_model;
    config.feeds_dir = rp_feeds;
    config.years = parse_years(rp_years);
    config.kb_dir = rp_kb;
    config.method = rp_method;
    config.top_k = rp_top_k;
    config.top_m = rp_top_m;
    PipelineResult result = run_pipeline(config);
    for (const std::string& note : result.notes) std::cerr << note << "\n";
    ReportFormat format = rp_format == "md" ? ReportFormat::Markdown : ReportFormat::Json;
    write_text(rp_out, emit_report(result.traces, format));
    std::cout << "wrote " << result.traces.size() << " traces\n";
    return 0;
  }

  if (*hist) {
    std::vector<TraceRecord> traces =
        traces_from_json(nlohmann::json::parse(read_file(hs_report)));
    std::vector<double> priorities;
    priorities.reserve(traces.size());
    for (const TraceRecord& t : traces) priorities.push_back(t.priority);
    std::vector<HistogramBin> bins = priority_histogram(priorities, {hs_clip, hs_bins});
    nlohmann::ordered_json out_bins = nlohmann::ordered_json::array();
    size_t retained = 0;
    for (const HistogramBin& b : bins) {
      out_bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
      retained += b.count;
    }
    write_json(hs_out, {{"clip_percentile", hs_clip},
                        {"retained", retained},
                        {"bins", std::move(out_bins)}});
    std::cout << "binned " << retained << " of " << priorities.size() << " priorities\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
