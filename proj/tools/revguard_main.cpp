#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "revguard/errors.hpp"
#include "revguard/pipeline.hpp"

using namespace revguard;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitReject = 2;

std::unique_ptr<ReviewerClient> build_client(const std::string& endpoint, const std::string& mock,
                                             const std::string& model_id,
                                             const std::string& api_key_env,
                                             const std::string& audit_log) {
  std::unique_ptr<ReviewerClient> client;
  if (!mock.empty()) {
    auto profile = mock_profile_from_string(mock);
    if (!profile) throw Error("unknown mock profile: " + mock);
    client = mock_reviewer(*profile);
  } else if (!endpoint.empty()) {
    HttpClientConfig cfg;
    cfg.endpoint = endpoint;
    cfg.model_id = model_id;
    cfg.api_key_env = api_key_env;
    client = make_http_client(cfg);
  }
  if (client && !audit_log.empty()) client->set_audit_log(audit_log);
  return client;
}

int cmd_gen_corpus(const std::string& out_dir, int n_clean, int n_attacked,
                   std::uint64_t seed) {
  CorpusSpec spec;
  spec.n_clean = n_clean;
  spec.n_attacked = n_attacked;
  spec.seed = seed;
  CorpusManifest manifest = generate_corpus(spec, out_dir);
  std::cout << "wrote " << manifest.entries.size() << " documents and manifest.json under "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_scan(const std::string& in_path, const std::string& report_path, Thresholds thresholds,
             const std::string& client_endpoint, const std::string& mock, bool no_probe,
             const std::string& ocr_cmd, const std::string& rules_path,
             const std::string& metric_name, const std::string& model_id,
             const std::string& api_key_env, const std::string& audit_log) {
  ScanOptions options;
  options.thresholds = thresholds;
  if (metric_name == "levenshtein") {
    options.metric = DistanceMetric::NormalizedLevenshtein;
  } else if (metric_name != "containment") {
    throw Error("unknown metric: " + metric_name);
  }

  std::vector<ScreenerRule> rules;
  if (!rules_path.empty()) {
    rules = load_rules(rules_path);
    options.rules = &rules;
  }
  std::unique_ptr<RenderBackend> ocr_backend;
  if (!ocr_cmd.empty()) {
    ocr_backend = std::make_unique<OcrRenderBackend>(ocr_cmd);
    options.renderer = ocr_backend.get();
  }
  std::unique_ptr<ReviewerClient> client;
  if (!no_probe) {
    client = build_client(client_endpoint, mock, model_id, api_key_env, audit_log);
    options.client = client.get();
  }

  ScanReport report = scan_document(in_path, options);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw IoFailure("cannot write " + report_path);
    out << report_to_json(report);
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (report.decision) {
    std::cout << "REJECT " << in_path << "\n";
    for (const auto& r : report.decision_reasons) std::cout << "  - " << r << "\n";
    return kExitReject;
  }
  std::cout << "CLEAN " << in_path << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& report_dir,
             const std::string& summary_path, Thresholds thresholds, bool with_reviews,
             const std::string& mock, int jobs) {
  CorpusManifest manifest = load_manifest(manifest_path);
  ScanOptions options;
  options.thresholds = thresholds;
  options.jobs = jobs;
  EvalSummary summary = evaluate_corpus(manifest, options, report_dir);

  if (with_reviews) {
    auto profile = mock_profile_from_string(mock.empty() ? "injection-sensitive" : mock);
    if (!profile) throw Error("unknown mock profile: " + mock);
    auto client = mock_reviewer(*profile);
    auto rows = review_corpus(manifest, *client);
    save_reviews_csv(rows, (fs::path(report_dir) / "reviews.csv").string());
  }
  if (!summary_path.empty()) {
    std::ofstream out(summary_path);
    if (!out) throw IoFailure("cannot write " + summary_path);
    out << summary_to_json(summary);
  }
  std::cout << "tp=" << summary.tp << " tn=" << summary.tn << " fp=" << summary.fp
            << " fn=" << summary.fn << " accuracy=" << summary.accuracy << "\n";
  return kExitOk;
}

int cmd_attack(const std::string& in_path, const std::string& out_path, int goal_overall,
               const std::string& goal_rec, int rounds, const std::string& endpoint,
               const std::string& mock, std::uint64_t seed, const std::string& trace_path,
               const std::string& model_id, const std::string& api_key_env,
               const std::string& audit_log) {
  AttackGoal goal;
  goal.target_overall = goal_overall;
  auto rec = recommendation_from_string(goal_rec);
  if (!rec) throw Error("unknown recommendation: " + goal_rec);
  goal.target_recommendation = *rec;

  auto surrogate = build_client(endpoint, mock, model_id, api_key_env, audit_log);
  if (!surrogate) throw Error("attack needs --surrogate-endpoint or --mock");

  OptimizationTrace trace = run_attack(in_path, goal, *surrogate, rounds, out_path, trace_path);
  const auto& best = trace.rounds[static_cast<std::size_t>(trace.best_round)];
  std::cout << "rounds=" << trace.rounds.size() << " best_round=" << trace.best_round
            << " best_score=" << best.score << " seed=" << seed << "\n";
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_trap_issue(const std::string& doc_id, const std::string& registry_path,
                   std::uint64_t seed, bool seed_given, const std::string& host_path,
                   const std::string& directive_out) {
  std::string host_text;
  if (!host_path.empty()) {
    std::ifstream in(host_path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + host_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    host_text = ss.str();
  }
  if (!seed_given) {
    // Stable per-document default so reissuing is idempotent.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : doc_id) h = (h ^ c) * 1099511628211ULL;
    seed = h;
  }
  TrapPattern trap = make_trap(seed, host_text);
  TrapRegistry registry = load_trap_registry(registry_path);
  registry[doc_id] = {trap.nonce, trap.seed, static_cast<std::int64_t>(std::time(nullptr))};
  save_trap_registry(registry, registry_path);
  if (!directive_out.empty()) {
    std::ofstream out(directive_out);
    if (!out) throw IoFailure("cannot write " + directive_out);
    out << trap.directive << "\n";
  }
  std::cout << "issued trap for " << doc_id << "\nnonce: " << trap.nonce
            << "\ndirective: " << trap.directive << "\n";
  return kExitOk;
}

int cmd_trap_check(const std::string& doc_id, const std::string& registry_path,
                   const std::string& review_path) {
  TrapVerdict v = check_review(review_path, registry_path, doc_id);
  if (v.z) {
    std::cout << "TRAP ECHOED (likely model-generated review): \"" << v.evidence
              << "\" at offset " << v.offset << "\n";
    return kExitReject;
  }
  // Absence of the echo is "no evidence", never proof of human authorship.
  std::cout << "no trap echo found (no evidence of model authorship)\n";
  return kExitOk;
}

int cmd_plot(const std::string& reports_dir, const std::string& out_dir) {
  auto written = emit_plots(reports_dir, out_dir);
  for (const auto& p : written) std::cout << "wrote " << p << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "revguard: hidden prompt-injection tooling for manuscript review pipelines\n"
      "(attack crafting, dual-view detection, stability probing, reviewer traps)"};
  app.require_subcommand(1);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic clean/attacked corpus");
  std::string gen_out = "corpus";
  int gen_clean = 10, gen_attacked = 10;
  std::uint64_t gen_seed = 0;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--n-clean", gen_clean, "number of clean papers");
  gen->add_option("--n-attacked", gen_attacked, "number of compromised twins");
  gen->add_option("--seed", gen_seed, "corpus seed");

  // scan
  auto* scan = app.add_subcommand("scan", "run the layered defense on one PDF");
  std::string scan_in, scan_report, scan_client, scan_mock, scan_ocr, scan_rules;
  std::string scan_metric = "containment", scan_model = "reviewer", scan_keyenv, scan_audit;
  Thresholds scan_thresholds;
  bool scan_no_probe = false, scan_synth = false;
  scan->add_option("--in", scan_in, "input PDF")->required();
  scan->add_option("--report", scan_report, "write the scan report JSON here");
  scan->add_option("--theta-struct", scan_thresholds.theta_struct, "structural threshold");
  scan->add_option("--theta-cls", scan_thresholds.theta_cls, "screener threshold");
  scan->add_option("--theta-rob", scan_thresholds.theta_rob, "stability threshold");
  auto* client_opt =
      scan->add_option("--client", scan_client, "reviewer endpoint for the stability probe");
  auto* mock_opt = scan->add_option("--mock", scan_mock, "mock reviewer profile for the probe");
  auto* no_probe_flag = scan->add_flag("--no-probe", scan_no_probe, "skip the behavioural layer");
  no_probe_flag->excludes(client_opt)->excludes(mock_opt);
  client_opt->excludes(mock_opt);
  auto* ocr_opt = scan->add_option(
      "--ocr", scan_ocr, "OCR command for the render view ({png} placeholder or path appended)");
  scan->add_flag("--synthetic-render", scan_synth,
                 "use the hermetic visibility-based render view (default)")
      ->excludes(ocr_opt);
  scan->add_option("--rules", scan_rules, "screener rule file (id<TAB>weight<TAB>pattern)");
  scan->add_option("--metric", scan_metric, "dual-view distance: containment|levenshtein");
  scan->add_option("--model", scan_model, "model id sent to the endpoint");
  scan->add_option("--api-key-env", scan_keyenv, "env var holding the endpoint credential");
  scan->add_option("--audit-log", scan_audit, "append raw completions to this JSONL file");

  // eval
  auto* eval = app.add_subcommand("eval", "scan a whole corpus and tally the confusion matrix");
  std::string eval_manifest, eval_report_dir = "reports", eval_summary, eval_mock;
  Thresholds eval_thresholds;
  bool eval_no_reviews = false;
  int eval_jobs = 1;
  eval->add_option("--manifest", eval_manifest, "corpus manifest.json")->required();
  eval->add_option("--report-dir", eval_report_dir, "directory for per-document reports");
  eval->add_option("--summary", eval_summary, "also write the summary JSON here");
  eval->add_option("--theta-struct", eval_thresholds.theta_struct, "structural threshold");
  eval->add_option("--theta-cls", eval_thresholds.theta_cls, "screener threshold");
  eval->add_option("--theta-rob", eval_thresholds.theta_rob, "stability threshold");
  eval->add_flag("--no-reviews", eval_no_reviews, "skip mock reviews (reviews.csv)");
  eval->add_option("--mock", eval_mock, "mock profile for reviews.csv");
  eval->add_option("--jobs", eval_jobs, "parallel scan workers");

  // attack
  auto* attack = app.add_subcommand("attack", "craft a compromised PDF against a surrogate");
  std::string atk_in, atk_out, atk_rec = "accept", atk_endpoint, atk_mock, atk_trace;
  std::string atk_model = "surrogate", atk_keyenv, atk_audit;
  int atk_overall = 10, atk_rounds = 3;
  std::uint64_t atk_seed = 0;
  attack->add_option("--in", atk_in, "clean input PDF")->required();
  attack->add_option("--out", atk_out, "compromised output PDF")->required();
  attack->add_option("--goal-overall", atk_overall, "target overall rating (1-10)");
  attack->add_option("--goal-rec", atk_rec, "target recommendation");
  attack->add_option("--rounds", atk_rounds, "optimization rounds");
  auto* surrogate_opt =
      attack->add_option("--surrogate-endpoint", atk_endpoint, "surrogate reviewer endpoint");
  attack->add_option("--mock", atk_mock, "mock surrogate profile")->excludes(surrogate_opt);
  attack->add_option("--seed", atk_seed, "recorded provenance seed");
  attack->add_option("--trace", atk_trace, "trace JSON path (default <out>.trace.json)");
  attack->add_option("--model", atk_model, "model id sent to the endpoint");
  attack->add_option("--api-key-env", atk_keyenv, "env var holding the endpoint credential");
  attack->add_option("--audit-log", atk_audit, "append raw completions to this JSONL file");

  // trap
  auto* trap = app.add_subcommand("trap", "issue or check editor-side reviewer traps");
  trap->require_subcommand(1);
  auto* issue = trap->add_subcommand("issue", "register a trap for a document id");
  std::string trap_doc, trap_registry = "trap_registry.json", trap_host, trap_directive_out;
  std::uint64_t trap_seed = 0;
  issue->add_option("--doc-id", trap_doc, "document id")->required();
  issue->add_option("--registry", trap_registry, "registry JSON path");
  auto* seed_opt = issue->add_option("--seed", trap_seed, "trap seed (default: id-derived)");
  issue->add_option("--host", trap_host, "host document text file (collision check)");
  issue->add_option("--directive-out", trap_directive_out, "write the directive here");
  auto* check = trap->add_subcommand("check", "check a submitted review for the trap echo");
  std::string check_doc, check_registry = "trap_registry.json", check_review_path;
  check->add_option("--doc-id", check_doc, "document id")->required();
  check->add_option("--registry", check_registry, "registry JSON path");
  check->add_option("--review", check_review_path, "review text file")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "render SVG charts from recorded eval output");
  std::string plot_reports, plot_out = "plots";
  plot->add_option("--reports", plot_reports, "directory with summary.json / reviews.csv")
      ->required();
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_corpus(gen_out, gen_clean, gen_attacked, gen_seed);
    if (scan->parsed()) {
      (void)scan_synth;  // synthetic rendering is already the default
      return cmd_scan(scan_in, scan_report, scan_thresholds, scan_client, scan_mock,
                      scan_no_probe, scan_ocr, scan_rules, scan_metric, scan_model, scan_keyenv,
                      scan_audit);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_manifest, eval_report_dir, eval_summary, eval_thresholds,
                      !eval_no_reviews, eval_mock, eval_jobs);
    }
    if (attack->parsed()) {
      return cmd_attack(atk_in, atk_out, atk_overall, atk_rec, atk_rounds, atk_endpoint,
                        atk_mock, atk_seed, atk_trace, atk_model, atk_keyenv, atk_audit);
    }
    if (trap->parsed()) {
      if (issue->parsed()) {
        return cmd_trap_issue(trap_doc, trap_registry, trap_seed, seed_opt->count() > 0,
                              trap_host, trap_directive_out);
      }
      return cmd_trap_check(check_doc, check_registry, check_review_path);
    }
    if (plot->parsed()) return cmd_plot(plot_reports, plot_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
