#include "policyflow/run.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <utility>

#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/gateway.hpp"
#include "policyflow/segmenter.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr std::size_t kTopCentrality = 10;

constexpr FlowCase kAllCases[] = {
    FlowCase::user_to_first,  FlowCase::first_to_first, FlowCase::third_to_first,
    FlowCase::user_to_third,  FlowCase::first_to_third, FlowCase::third_to_third,
    FlowCase::incomplete};

PartyAttribute attribute_from_name(const std::string& name) {
    if (name == "first_party") return PartyAttribute::first_party;
    if (name == "third_party") return PartyAttribute::third_party;
    if (name == "user_party") return PartyAttribute::user_party;
    if (name == "unknown") return PartyAttribute::unknown;
    throw SchemaViolation("unknown party attribute '" + name + "'");
}

FlowCase case_from_name(const std::string& name) {
    for (FlowCase flow_case : kAllCases)
        if (flow_case_name(flow_case) == name) return flow_case;
    throw SchemaViolation("unknown flow case '" + name + "'");
}

std::shared_ptr<Backend> make_backend(const RunConfig& config) {
    if (config.backend == "mock") return std::make_shared<MockBackend>(config.fixtures_dir);
    LiveBackendConfig live;
    live.base_url = config.base_url;
    live.api_key_env = config.api_key_env;
    return std::make_shared<LiveBackend>(live);
}

ordered_json flow_to_json(const ParsedFlow& flow) {
    ordered_json entry;
    if (flow.sender.has_value()) entry["sender"] = *flow.sender;
    else entry["sender"] = nullptr;
    entry["data_type"] = flow.data_type;
    if (flow.receiver.has_value()) entry["receiver"] = *flow.receiver;
    else entry["receiver"] = nullptr;
    entry["sender_party"] = std::string(party_attribute_name(flow.sender_party));
    entry["receiver_party"] = std::string(party_attribute_name(flow.receiver_party));
    entry["flow_case"] = std::string(flow_case_name(flow.flow_case));
    entry["data_category"] = flow.data_category;
    entry["consumer_type"] = flow.consumer_type;
    entry["purpose"] = flow.purpose;
    entry["method"] = flow.method;
    entry["segment_index"] = flow.segment_index;
    entry["provenance"] = flow.provenance;
    return entry;
}

std::optional<std::string> read_nullable(const nlohmann::json& object, const char* key) {
    if (!object.contains(key))
        throw SchemaViolation(std::string("flow record is missing '") + key + "'");
    const auto& value = object.at(key);
    if (value.is_null()) return std::nullopt;
    if (!value.is_string())
        throw SchemaViolation(std::string("flow record field '") + key +
                              "' must be a string or null");
    return value.get<std::string>();
}

std::string read_string(const nlohmann::json& object, const char* key) {
    if (!object.contains(key) || !object.at(key).is_string())
        throw SchemaViolation(std::string("flow record needs string field '") + key + "'");
    return object.at(key).get<std::string>();
}

ParsedFlow flow_from_json(const nlohmann::json& object) {
    if (!object.is_object()) throw SchemaViolation("flow record must be a JSON object");
    ParsedFlow flow;
    flow.sender = read_nullable(object, "sender");
    flow.data_type = read_string(object, "data_type");
    flow.receiver = read_nullable(object, "receiver");
    flow.sender_party = attribute_from_name(read_string(object, "sender_party"));
    flow.receiver_party = attribute_from_name(read_string(object, "receiver_party"));
    flow.flow_case = case_from_name(read_string(object, "flow_case"));
    flow.data_category = read_string(object, "data_category");
    flow.consumer_type = read_string(object, "consumer_type");
    flow.purpose = read_string(object, "purpose");
    flow.method = read_string(object, "method");
    if (!object.contains("segment_index") || !object.at("segment_index").is_number_unsigned())
        throw SchemaViolation("flow record needs unsigned field 'segment_index'");
    flow.segment_index = object.at("segment_index").get<std::size_t>();
    if (!object.contains("provenance") || !object.at("provenance").is_array())
        throw SchemaViolation("flow record needs array field 'provenance'");
    for (const auto& item : object.at("provenance")) {
        if (!item.is_number_unsigned())
            throw SchemaViolation("flow record provenance entries must be unsigned");
        flow.provenance.push_back(item.get<std::size_t>());
    }
    return flow;
}

struct SegmentCounts {
    std::size_t total = 0;
    std::size_t ok = 0;
    std::size_t screened_out = 0;
    std::size_t parse_failure = 0;
    std::size_t backend_error = 0;
};

SegmentCounts count_statuses(const std::vector<std::string>& statuses) {
    SegmentCounts counts;
    counts.total = statuses.size();
    for (const auto& status : statuses) {
        if (status == "ok") ++counts.ok;
        else if (status == "screened_out") ++counts.screened_out;
        else if (status == "parse_failure") ++counts.parse_failure;
        else if (status == "backend_error") ++counts.backend_error;
    }
    return counts;
}

ordered_json counts_to_json(const SegmentCounts& counts) {
    ordered_json block;
    block["total"] = counts.total;
    block["ok"] = counts.ok;
    block["screened_out"] = counts.screened_out;
    block["parse_failure"] = counts.parse_failure;
    block["backend_error"] = counts.backend_error;
    return block;
}

// Per-component corpus maxima over policies with at least one flow, the same
// exclusion the risk denominator uses.
ordered_json corpus_maxima(const RunResult& run) {
    std::map<FlowCase, double> per_case;
    for (FlowCase flow_case : kAllCases) per_case[flow_case] = 0.0;
    double first_total = 0.0;
    double third_total = 0.0;
    for (const auto& policy : run.policies) {
        if (policy.stats.zero_flows()) continue;
        for (FlowCase flow_case : kAllCases) {
            auto it = policy.stats.freq.find(flow_case);
            if (it != policy.stats.freq.end())
                per_case[flow_case] = std::max(per_case[flow_case], it->second);
        }
        first_total = std::max(first_total, policy.stats.first_party_total());
        third_total = std::max(third_total, policy.stats.third_party_total());
    }
    ordered_json block;
    for (FlowCase flow_case : kAllCases)
        block[std::string(flow_case_name(flow_case))] = per_case[flow_case];
    block["first_party_total"] = first_total;
    block["third_party_total"] = third_total;
    return block;
}

ordered_json stats_to_json(const FlowStats& stats) {
    ordered_json block;
    for (FlowCase flow_case : kAllCases) {
        auto it = stats.freq.find(flow_case);
        block[std::string(flow_case_name(flow_case))] =
            it != stats.freq.end() ? it->second : 0.0;
    }
    block["first_party_total"] = stats.first_party_total();
    block["third_party_total"] = stats.third_party_total();
    return block;
}

ordered_json summary_to_json(const NetworkSummary& summary) {
    ordered_json block;
    block["edges"] = summary.edges;
    block["first_party_nodes"] = summary.first_party_nodes;
    block["third_party_nodes"] = summary.third_party_nodes;
    block["user_party_nodes"] = summary.user_party_nodes;
    block["unknown_party_nodes"] = summary.unknown_party_nodes;
    block["data_type_nodes"] = summary.data_type_nodes;
    return block;
}

ordered_json top_centrality_json(const DataFlowGraph& graph) {
    const std::pair<CentralityMetric, const char*> metrics[] = {
        {CentralityMetric::degree, "degree"},
        {CentralityMetric::closeness, "closeness"},
        {CentralityMetric::betweenness, "betweenness"}};
    ordered_json block;
    for (const auto& [metric, name] : metrics) {
        ordered_json list = ordered_json::array();
        for (const auto& [id, score] : top_k(graph, metric, kTopCentrality)) {
            ordered_json row;
            row["id"] = id;
            row["score"] = score;
            list.push_back(std::move(row));
        }
        block[name] = std::move(list);
    }
    return block;
}

ordered_json weights_to_json(const RiskWeights& weights) {
    ordered_json block;
    block["user_to_first"] = weights.user_to_first;
    block["first_to_first"] = weights.first_to_first;
    block["third_to_first"] = weights.third_to_first;
    block["user_to_third"] = weights.user_to_third;
    block["first_to_third"] = weights.first_to_third;
    block["third_to_third"] = weights.third_to_third;
    block["overall_first"] = weights.overall_first;
    block["overall_third"] = weights.overall_third;
    block["overall_incomplete"] = weights.overall_incomplete;
    return block;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += "\"";
    return quoted;
}

const nlohmann::json& require_key(const nlohmann::json& object, const char* key,
                                  const char* where) {
    if (!object.is_object() || !object.contains(key))
        throw SchemaViolation(std::string(where) + " is missing '" + key + "'");
    return object.at(key);
}

}  // namespace

RunResult analyze_run(const RunConfig& config) {
    validate_config(config);
    if (config.inputs.empty()) throw EmptyCorpus("analyze_run: no inputs configured");
    auto started = std::chrono::steady_clock::now();

    auto knowledge = load_knowledge(config.kb_dir);
    auto prompts = load_prompts(config.prompts_dir);
    SynonymTable synonyms;
    if (!config.synonyms_path.empty()) synonyms = load_synonyms(config.synonyms_path);

    Gateway gateway(make_backend(config), config.cache_dir);
    AgentSuite agents(gateway, knowledge, prompts, config.models, config.retrieval,
                      config.temperature, config.top_p);

    RunResult run;
    std::vector<FlowStats> corpus;
    for (const auto& input : config.inputs) {
        auto html = read_file(input.html_path);
        PolicyDocument doc{input.policy_id, input.org_name, html};
        auto pipeline = run_pipeline(doc, agents, config.threads);

        PolicyRunResult policy;
        policy.policy_id = input.policy_id;
        policy.org_name = input.org_name;
        policy.input_sha256 = sha256_hex(html);
        policy.segment_statuses.reserve(pipeline.outcomes.size());
        for (const auto& outcome : pipeline.outcomes)
            policy.segment_statuses.push_back(outcome.status);

        EntityLexicon lexicon;
        lexicon.org_name = input.org_name;
        policy.flows = parse_records(pipeline.records, lexicon, synonyms);
        policy.graph = build_graph(policy.flows, input.policy_id);
        policy.stats = compute_flow_stats(input.policy_id, policy.flows);
        policy.summary = network_summary(policy.graph);

        corpus.push_back(policy.stats);
        run.policies.push_back(std::move(policy));
    }
    run.scores = compute_risk_scores(corpus, config.weights);
    run.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return run;
}

std::string flows_to_jsonl(const std::vector<ParsedFlow>& flows) {
    std::string out;
    for (const auto& flow : flows) out += flow_to_json(flow).dump() + "\n";
    return out;
}

std::vector<ParsedFlow> flows_from_jsonl(const std::string& text) {
    std::vector<ParsedFlow> flows;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        auto line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded())
            throw SchemaViolation("flows jsonl line is not valid JSON: " + line);
        flows.push_back(flow_from_json(parsed));
    }
    return flows;
}

std::string render_report_json(const RunConfig& config, const RunResult& run) {
    ordered_json report;
    report["schema_version"] = kSchemaVersion;
    report["generator"] = "policyflow";
    ordered_json conventions;
    conventions["degree"] = "(in + out) / (M - 1)";
    conventions["closeness"] = "Wasserman-Faust scaled closeness over incoming distances";
    conventions["betweenness"] = "Brandes, normalized by (M - 1)(M - 2)";
    conventions["parallel_purpose_arcs"] = "collapsed to one arc per direction for paths";
    report["centrality_conventions"] = std::move(conventions);

    ordered_json policies = ordered_json::array();
    std::vector<ParsedFlow> all_flows;
    for (const auto& policy : run.policies) {
        ordered_json block;
        block["policy_id"] = policy.policy_id;
        block["org_name"] = policy.org_name;
        block["segments"] = counts_to_json(count_statuses(policy.segment_statuses));
        block["total_flows"] = policy.stats.total_flows;
        block["flow_stats"] = stats_to_json(policy.stats);
        block["network_summary"] = summary_to_json(policy.summary);
        block["top_centrality"] = top_centrality_json(policy.graph);
        ordered_json categories;
        for (const auto& [category, count] : category_distribution(policy.flows))
            categories[category] = count;
        block["category_distribution"] = std::move(categories);
        policies.push_back(std::move(block));
        all_flows.insert(all_flows.end(), policy.flows.begin(), policy.flows.end());
    }
    report["policies"] = std::move(policies);
    report["corpus_maxima"] = corpus_maxima(run);
    report["risk_weights"] = weights_to_json(config.weights);

    ordered_json scores = ordered_json::array();
    for (const auto& score : run.scores) {
        ordered_json row;
        row["policy_id"] = score.policy_id;
        row["first_party_score"] = score.first_party_score;
        row["third_party_score"] = score.third_party_score;
        row["overall_score"] = score.overall_score;
        scores.push_back(std::move(row));
    }
    report["risk_scores"] = std::move(scores);

    ordered_json matrix = ordered_json::array();
    for (const auto& [key, count] : category_purpose_matrix(all_flows)) {
        ordered_json row;
        row["data_category"] = key.first;
        row["purpose"] = key.second;
        row["count"] = count;
        matrix.push_back(std::move(row));
    }
    report["category_purpose_matrix"] = std::move(matrix);
    return report.dump(2) + "\n";
}

std::string render_report_csv(const RunResult& run) {
    std::string out =
        "policy_id,org_name,total_flows,user_to_first,first_to_first,third_to_first,"
        "user_to_third,first_to_third,third_to_third,incomplete,first_party_total,"
        "third_party_total,first_party_score,third_party_score,overall_score,edges,"
        "first_party_nodes,third_party_nodes,user_party_nodes,unknown_party_nodes,"
        "data_type_nodes\n";
    auto num = [](double value) { return format_fixed(value, 2); };
    for (std::size_t i = 0; i < run.policies.size(); ++i) {
        const auto& policy = run.policies[i];
        const auto& score = run.scores[i];
        out += csv_field(policy.policy_id) + "," + csv_field(policy.org_name) + ",";
        out += std::to_string(policy.stats.total_flows) + ",";
        for (FlowCase flow_case : kAllCases) {
            auto it = policy.stats.freq.find(flow_case);
            out += num(it != policy.stats.freq.end() ? it->second : 0.0) + ",";
        }
        out += num(policy.stats.first_party_total()) + ",";
        out += num(policy.stats.third_party_total()) + ",";
        out += num(score.first_party_score) + "," + num(score.third_party_score) + "," +
               num(score.overall_score) + ",";
        out += std::to_string(policy.summary.edges) + ",";
        out += std::to_string(policy.summary.first_party_nodes) + ",";
        out += std::to_string(policy.summary.third_party_nodes) + ",";
        out += std::to_string(policy.summary.user_party_nodes) + ",";
        out += std::to_string(policy.summary.unknown_party_nodes) + ",";
        out += std::to_string(policy.summary.data_type_nodes) + "\n";
    }
    return out;
}

std::string render_report_text(const RunResult& run) {
    std::size_t total_flows = 0;
    for (const auto& policy : run.policies) total_flows += policy.stats.total_flows;
    std::string out = std::to_string(run.policies.size()) + " policies, " +
                      std::to_string(total_flows) + " flows\n";
    auto num = [](double value) { return format_fixed(value, 2); };
    for (std::size_t i = 0; i < run.policies.size(); ++i) {
        const auto& policy = run.policies[i];
        const auto& score = run.scores[i];
        auto counts = count_statuses(policy.segment_statuses);
        out += policy.policy_id + " (" + policy.org_name + ")\n";
        out += "  segments: " + std::to_string(counts.total) + " total, " +
               std::to_string(counts.ok) + " ok, " + std::to_string(counts.screened_out) +
               " screened out, " + std::to_string(counts.parse_failure) + " parse failures, " +
               std::to_string(counts.backend_error) + " backend errors\n";
        out += "  flows: " + std::to_string(policy.stats.total_flows) +
               "  edges: " + std::to_string(policy.summary.edges) +
               "  parties: " + std::to_string(policy.summary.first_party_nodes) + " first, " +
               std::to_string(policy.summary.third_party_nodes) + " third, " +
               std::to_string(policy.summary.user_party_nodes) + " user, " +
               std::to_string(policy.summary.unknown_party_nodes) + " unknown" +
               "  data types: " + std::to_string(policy.summary.data_type_nodes) + "\n";
        out += "  cases:";
        for (FlowCase flow_case : kAllCases) {
            auto it = policy.stats.freq.find(flow_case);
            out += " " + std::string(flow_case_name(flow_case)) + " " +
                   num(it != policy.stats.freq.end() ? it->second : 0.0);
        }
        out += "\n";
        out += "  risk: first " + num(score.first_party_score) + "  third " +
               num(score.third_party_score) + "  overall " + num(score.overall_score) + "\n";
    }
    return out;
}

std::string render_manifest_json(const RunConfig& config, const RunResult& run) {
    ordered_json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["generator"] = "policyflow";
    manifest["config_hash"] = config_hash(config);
    manifest["elapsed_ms"] = run.elapsed_ms;

    std::map<std::string, std::string> paths;
    for (const auto& input : config.inputs) paths[input.policy_id] = input.html_path;

    ordered_json inputs = ordered_json::array();
    ordered_json policies = ordered_json::array();
    for (const auto& policy : run.policies) {
        ordered_json input_row;
        input_row["policy_id"] = policy.policy_id;
        input_row["org_name"] = policy.org_name;
        auto it = paths.find(policy.policy_id);
        input_row["path"] = it != paths.end() ? it->second : "";
        input_row["sha256"] = policy.input_sha256;
        inputs.push_back(std::move(input_row));

        ordered_json policy_row;
        policy_row["policy_id"] = policy.policy_id;
        policy_row["segment_statuses"] = policy.segment_statuses;
        policy_row["segment_counts"] = counts_to_json(count_statuses(policy.segment_statuses));
        policy_row["flows"] = policy.flows.size();
        policies.push_back(std::move(policy_row));
    }
    manifest["inputs"] = std::move(inputs);
    manifest["policies"] = std::move(policies);
    return manifest.dump(2) + "\n";
}

void write_run_artifacts(const RunConfig& config, const RunResult& run) {
    namespace fs = std::filesystem;
    fs::path root(config.output_dir);
    fs::create_directories(root);
    for (const auto& policy : run.policies) {
        fs::path dir = root / policy.policy_id;
        fs::create_directories(dir);
        write_file_atomic(dir / "flows.jsonl", flows_to_jsonl(policy.flows));
        write_file_atomic(dir / "graph.json", export_graph(policy.graph, ExportFormat::json));
        write_file_atomic(dir / "graph.dot", export_graph(policy.graph, ExportFormat::dot));
        write_file_atomic(dir / "graph.html", export_graph(policy.graph, ExportFormat::html));
    }
    write_file_atomic(root / "report.json", render_report_json(config, run));
    write_file_atomic(root / "report.csv", render_report_csv(run));
    write_file_atomic(root / "manifest.json", render_manifest_json(config, run));
}

RunResult reload_run(const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::path root(config.output_dir);
    auto manifest = nlohmann::json::parse(read_file(root / "manifest.json"), nullptr, false);
    if (manifest.is_discarded())
        throw SchemaViolation("run manifest is not valid JSON: " +
                              (root / "manifest.json").string());
    const auto& version = require_key(manifest, "schema_version", "run manifest");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        throw SchemaMismatch("run manifest schema_version " + version.dump() +
                             " is not supported");

    std::map<std::string, std::pair<std::string, std::string>> inputs;  // id -> (org, sha)
    for (const auto& row : require_key(manifest, "inputs", "run manifest")) {
        auto id = require_key(row, "policy_id", "manifest input").get<std::string>();
        inputs[id] = {require_key(row, "org_name", "manifest input").get<std::string>(),
                      require_key(row, "sha256", "manifest input").get<std::string>()};
    }

    RunResult run;
    const auto& elapsed = require_key(manifest, "elapsed_ms", "run manifest");
    if (!elapsed.is_number_integer())
        throw SchemaViolation("run manifest elapsed_ms must be an integer");
    run.elapsed_ms = elapsed.get<long long>();

    std::vector<FlowStats> corpus;
    for (const auto& row : require_key(manifest, "policies", "run manifest")) {
        PolicyRunResult policy;
        policy.policy_id = require_key(row, "policy_id", "manifest policy").get<std::string>();
        auto it = inputs.find(policy.policy_id);
        if (it == inputs.end())
            throw SchemaViolation("run manifest has no input for policy '" + policy.policy_id +
                                  "'");
        policy.org_name = it->second.first;
        policy.input_sha256 = it->second.second;
        for (const auto& status : require_key(row, "segment_statuses", "manifest policy")) {
            if (!status.is_string())
                throw SchemaViolation("manifest segment_statuses must be strings");
            policy.segment_statuses.push_back(status.get<std::string>());
        }
        policy.flows = flows_from_jsonl(read_file(root / policy.policy_id / "flows.jsonl"));
        policy.graph = build_graph(policy.flows, policy.policy_id);
        policy.stats = compute_flow_stats(policy.policy_id, policy.flows);
        policy.summary = network_summary(policy.graph);
        corpus.push_back(policy.stats);
        run.policies.push_back(std::move(policy));
    }
    run.scores = compute_risk_scores(corpus, config.weights);
    return run;
}

std::string compare_reports(const std::vector<std::string>& report_texts) {
    if (report_texts.size() < 2)
        throw ConfigError("compare needs at least two reports");

    std::string out =
        "report,policy_id,org_name,total_flows,first_party_score,third_party_score,"
        "overall_score,user_to_first,first_to_first,third_to_first,user_to_third,"
        "first_to_third,third_to_third,incomplete,category_distribution\n";
    auto num = [](double value) { return format_fixed(value, 4); };

    int version = 0;
    for (std::size_t index = 0; index < report_texts.size(); ++index) {
        auto report = nlohmann::json::parse(report_texts[index], nullptr, false);
        if (report.is_discarded())
            throw SchemaViolation("report " + std::to_string(index + 1) + " is not valid JSON");
        const auto& this_version = require_key(report, "schema_version", "report");
        if (!this_version.is_number_integer())
            throw SchemaViolation("report schema_version must be an integer");
        if (index == 0) version = this_version.get<int>();
        else if (this_version.get<int>() != version)
            throw SchemaMismatch("report schema versions disagree: " + std::to_string(version) +
                                 " vs " + this_version.dump());

        std::map<std::string, const nlohmann::json*> scores;
        for (const auto& row : require_key(report, "risk_scores", "report"))
            scores[require_key(row, "policy_id", "risk score").get<std::string>()] = &row;

        for (const auto& policy : require_key(report, "policies", "report")) {
            auto id = require_key(policy, "policy_id", "report policy").get<std::string>();
            auto score = scores.find(id);
            if (score == scores.end())
                throw SchemaViolation("report has no risk scores for policy '" + id + "'");
            out += std::to_string(index + 1) + "," + csv_field(id) + ",";
            out += csv_field(require_key(policy, "org_name", "report policy").get<std::string>()) +
                   ",";
            out += require_key(policy, "total_flows", "report policy").dump() + ",";
            out += num(require_key(*score->second, "first_party_score", "risk score")
                           .get<double>()) + ",";
            out += num(require_key(*score->second, "third_party_score", "risk score")
                           .get<double>()) + ",";
            out += num(require_key(*score->second, "overall_score", "risk score").get<double>()) +
                   ",";
            const auto& stats = require_key(policy, "flow_stats", "report policy");
            for (FlowCase flow_case : kAllCases)
                out += num(require_key(stats, flow_case_name(flow_case).data(), "flow stats")
                               .get<double>()) + ",";
            std::string categories;
            for (const auto& [category, count] :
                 require_key(policy, "category_distribution", "report policy").items()) {
                if (!categories.empty()) categories += ";";
                categories += category + "=" + count.dump();
            }
            out += csv_field(categories) + "\n";
        }
    }
    return out;
}

}  // namespace policyflow
