#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revguard/attack.hpp"
#include "revguard/corpus.hpp"
#include "revguard/pdf_model.hpp"
#include "revguard/probe.hpp"
#include "revguard/review.hpp"
#include "revguard/screener.hpp"
#include "revguard/structural.hpp"
#include "revguard/trap.hpp"

namespace revguard {

struct Thresholds {
  double theta_struct = 0.15;
  double theta_cls = 0.5;
  double theta_rob = 0.25;
};

/// Everything one defense pass records about a document. The decision is
/// recomputable from the stored signals alone (see evaluate_reject_rule).
struct ScanReport {
  int version = 1;
  std::string document_path;
  Thresholds thresholds;
  std::vector<BlockDelta> block_deltas;
  std::vector<ScreenResult> screen_results;
  std::optional<StabilityReport> stability;
  std::optional<TrapVerdict> trap;
  bool decision = false;
  std::vector<std::string> decision_reasons;
  std::vector<std::string> warnings;
};

/// Re-evaluates the reject rule from the report's stored values only:
/// any delta > theta_struct, any score > theta_cls, or gamma > theta_rob
/// (absent stability counts as 0).
bool evaluate_reject_rule(const ScanReport& report);

std::string report_to_json(const ScanReport& report);
ScanReport report_from_json(const std::string& json_text);

struct ScanOptions {
  Thresholds thresholds;
  DistanceMetric metric = DistanceMetric::WordContainment;
  const RenderBackend* renderer = nullptr;            // null -> synthetic
  const std::vector<ScreenerRule>* rules = nullptr;   // null -> default_rules()
  ReviewerClient* client = nullptr;                   // layer 2 runs only when set
  std::uint64_t probe_seed = 17;
  int jobs = 1;  // worker pool size for corpus evaluation
};

/// Full layered scan: structural dual-view, screener over every block, and
/// (only when layer 1 stays quiet and a client is available) the stability
/// probe. A render-backend failure downgrades the scan to screener-only mode
/// and is recorded in warnings.
ScanReport scan_document(const std::string& doc_path, const ScanOptions& options);
ScanReport scan_loaded_document(const PdfDocument& doc, const std::string& path_label,
                                const ScanOptions& options);

struct EvalSummary {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0;
};

std::string summary_to_json(const EvalSummary& summary);
EvalSummary summary_from_json(const std::string& json_text);

/// Scans every manifest entry ("attacked" is the positive class), writes one
/// report per document plus summary.json into report_dir, and returns the
/// confusion counts.
EvalSummary evaluate_corpus(const CorpusManifest& manifest, const ScanOptions& options,
                            const std::string& report_dir);

/// One reviewer verdict per corpus entry, for the attack-efficacy side.
struct ReviewRow {
  std::string paper;
  std::string label;
  std::string model;
  StructuredReview review;
};

std::vector<ReviewRow> review_corpus(const CorpusManifest& manifest, ReviewerClient& client);
void save_reviews_csv(const std::vector<ReviewRow>& rows, const std::string& path);
std::vector<ReviewRow> load_reviews_csv(const std::string& path);

/// Runs the iterative attack against a surrogate and writes the best
/// compromised PDF to out_path and the trace JSON to trace_path (empty ->
/// out_path + ".trace.json").
OptimizationTrace run_attack(const std::string& doc_path, const AttackGoal& goal,
                             ReviewerClient& surrogate, int rounds, const std::string& out_path,
                             const std::string& trace_path = "");

std::string trace_to_json(const OptimizationTrace& trace);

/// Loads the registered trap for document_id and checks the review file.
TrapVerdict check_review(const std::string& review_path, const std::string& registry_path,
                         const std::string& document_id);

/// Renders SVG charts from recorded eval output (summary.json and/or
/// reviews.csv found in reports_dir). Returns the written paths; throws
/// NoData when reports_dir holds neither input.
std::vector<std::string> emit_plots(const std::string& reports_dir, const std::string& out_dir);

}  // namespace revguard
