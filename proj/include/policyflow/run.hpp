#pragma once

#include <string>
#include <vector>

#include "policyflow/analyser.hpp"
#include "policyflow/config.hpp"
#include "policyflow/flow_parser.hpp"
#include "policyflow/graph.hpp"

namespace policyflow {

// Everything derived from one input policy during a run.
struct PolicyRunResult {
    std::string policy_id;
    std::string org_name;
    std::string input_sha256;
    std::vector<std::string> segment_statuses;  // per segment, in index order
    std::vector<ParsedFlow> flows;
    DataFlowGraph graph;
    FlowStats stats;
    NetworkSummary summary;
};

struct RunResult {
    std::vector<PolicyRunResult> policies;  // input order
    std::vector<RiskScores> scores;         // aligned with policies
    long long elapsed_ms = 0;
};

// Runs the whole pipeline over every configured input. Raises EmptyCorpus
// when no inputs are configured and ConfigError on an invalid config.
RunResult analyze_run(const RunConfig& config);

// One JSON object per line; round-trips through flows_from_jsonl.
std::string flows_to_jsonl(const std::vector<ParsedFlow>& flows);
std::vector<ParsedFlow> flows_from_jsonl(const std::string& text);

// Machine-readable corpus report. Carries no timing, so regenerating it from
// reloaded artifacts reproduces the bytes exactly.
std::string render_report_json(const RunConfig& config, const RunResult& run);

// One row per policy, two-decimal fixed-point numbers.
std::string render_report_csv(const RunResult& run);

// Human-readable summary for the terminal.
std::string render_report_text(const RunResult& run);

// Input digests, per-segment statuses, and timing for provenance.
std::string render_manifest_json(const RunConfig& config, const RunResult& run);

// Writes <output_dir>/<policy>/{flows.jsonl, graph.json, graph.dot,
// graph.html} and <output_dir>/{report.json, report.csv, manifest.json}.
void write_run_artifacts(const RunConfig& config, const RunResult& run);

// Rebuilds a RunResult from a previous run's artifacts in
// config.output_dir; graphs, stats, and scores are recomputed from the
// stored flows.
RunResult reload_run(const RunConfig& config);

// Merges two or more report.json payloads into one comparison CSV. Raises
// ConfigError on fewer than two reports and SchemaMismatch when schema
// versions disagree.
std::string compare_reports(const std::vector<std::string>& report_texts);

}  // namespace policyflow
