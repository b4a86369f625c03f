#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "policyflow/gateway.hpp"
#include "policyflow/knowledge.hpp"
#include "policyflow/segmenter.hpp"

namespace policyflow {

struct PromptTemplate {
    std::string agent;  // screening | flow | data_category | consumer_type | purpose | method
    std::string system_rules;
    std::string user_skeleton;
};

// File format: a "[system]" line, the system rules, a "[user]" line, the user
// skeleton with {TEXT_SEGMENT} / {INPUT_DATA_TYPE} / {CONTEXTS} / {PREV} /
// {NEXT} placeholders. Throws SchemaViolation on a malformed file.
PromptTemplate load_prompt_template(const std::string& path, const std::string& agent);

// Replaces each "{KEY}" from values; other braces (JSON examples) are kept.
std::string fill_placeholders(const std::string& skeleton,
                              const std::map<std::string, std::string>& values);

struct PromptSet {
    PromptTemplate screening;
    PromptTemplate flow;
    PromptTemplate data_category;
    PromptTemplate consumer_type;
    PromptTemplate purpose;
    PromptTemplate method;
};

PromptSet load_prompts(const std::string& prompts_dir);

struct KnowledgeSet {
    KnowledgeIndex data_category;
    KnowledgeIndex consumer_type;
    KnowledgeIndex purpose;
    KnowledgeIndex method;
};

KnowledgeSet load_knowledge(const std::string& kb_dir);

// One directed flow after cartesian expansion; nullopt marks a missing
// endpoint (the placeholder).
struct DataFlow {
    std::optional<std::string> sender;
    std::string data_type;
    std::optional<std::string> receiver;
    std::size_t segment_index = 0;

    bool operator==(const DataFlow&) const = default;
};

// Expansion order: tuple order, then sender-major, type, receiver. An empty
// sender/receiver list contributes the single missing endpoint; no types
// means no flows.
std::vector<DataFlow> expand_tuples(const std::vector<RawFlowTuple>& tuples,
                                    std::size_t segment_index);

// "sender → type → receiver" with "unknown" for missing endpoints.
std::string render_flow(const DataFlow& flow);

struct TraceEntry {
    std::string node;
    double score = 0.0;

    bool operator==(const TraceEntry&) const = default;
};

struct FlowRecord {
    DataFlow flow;
    std::string data_category;
    std::string consumer_type;  // First Party | Third Party | Undefined
    std::string purpose;
    std::string method;  // Active | Passive | Unspecified
    std::map<std::string, std::vector<TraceEntry>> retrieval_trace;
};

struct AgentModels {
    std::string screening = "llama-3.3-70b-versatile";
    std::string flow = "llama-3.3-70b-versatile";
    std::string data_category = "llama3-70b-8192";
    std::string consumer_type = "llama-3.1-8b-instant";
    std::string purpose = "llama-3.1-8b-instant";
    std::string method = "llama-3.1-8b-instant";

    bool operator==(const AgentModels&) const = default;
};

struct Labeled {
    std::string label;
    std::vector<TraceEntry> trace;
};

// The six-stage processor: screening, flow extraction, and four
// retrieval-augmented classifiers. Thread-safe after construction.
class AgentSuite {
public:
    AgentSuite(Gateway& gateway, const KnowledgeSet& knowledge, const PromptSet& prompts,
               AgentModels models = {}, RetrievalPolicy policy = {}, double temperature = 0.5,
               double top_p = 0.5);

    // True only for a YES verdict (case-insensitive).
    bool screen(const Segment& segment) const;

    // Cartesian-expanded flows; on a malformed extraction response returns
    // an empty list and stores the message in *parse_error when given.
    std::vector<DataFlow> extract_flows(const Segment& segment,
                                        std::string* parse_error = nullptr) const;

    Labeled classify_data_category(const DataFlow& flow, const Segment& segment) const;
    Labeled classify_consumer_type(const DataFlow& flow, const Segment& segment) const;
    Labeled classify_purpose(const DataFlow& flow, const Segment& segment) const;
    Labeled classify_method(const DataFlow& flow, const Segment& segment, const Segment* prev,
                            const Segment* next) const;

    // All four classifiers over one flow.
    FlowRecord annotate(const DataFlow& flow, const Segment& segment, const Segment* prev,
                        const Segment* next) const;

private:
    ChatRequest make_request(const std::string& model, const PromptTemplate& tmpl,
                             const std::map<std::string, std::string>& values) const;
    Labeled classify(const KnowledgeIndex& index, const std::string& query,
                     const PromptTemplate& tmpl, const std::string& model,
                     std::map<std::string, std::string> values, const RetrievalPolicy& policy,
                     const std::vector<std::string>& allowed, const std::string& repair) const;

    Gateway& gateway_;
    const KnowledgeSet& knowledge_;
    const PromptSet& prompts_;
    AgentModels models_;
    RetrievalPolicy policy_;
    double temperature_;
    double top_p_;
};

struct SegmentOutcome {
    std::size_t segment_index = 0;
    std::string status;  // screened_out | ok | parse_failure | backend_error
    std::string detail;
    std::vector<FlowRecord> records;
};

struct PipelineResult {
    std::vector<SegmentOutcome> outcomes;  // one per segment, in index order
    std::vector<FlowRecord> records;       // concatenation in segment order
};

// Segments the document and runs every stage; per-segment failures become
// outcome statuses, never exceptions. threads <= 1 runs inline.
PipelineResult run_pipeline(const PolicyDocument& doc, const AgentSuite& agents, int threads = 1);

}  // namespace policyflow
