#include "policyflow/agents.hpp"

#include <atomic>
#include <filesystem>
#include <thread>
#include <utility>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

struct ContextLabels {
    const char* title;
    const char* examples;
};

ContextLabels context_labels(const std::string& kind) {
    if (kind == "data_category") return {"Data category", "Example data types"};
    if (kind == "consumer_type") return {"Data consumer type", "Example entities"};
    if (kind == "purpose") return {"Data processing purpose", "Example activities"};
    return {"Data processing method", "Example activities"};
}

std::string render_contexts(const std::vector<RetrievedContext>& contexts) {
    std::string out;
    for (const auto& ctx : contexts) {
        auto labels = context_labels(ctx.typology_kind);
        out += "CONTEXT:\n";
        out += std::string(labels.title) + ": " + ctx.node->name + "\n";
        out += "Data description: " + ctx.node->description + "\n";
        if (!ctx.node->examples.empty())
            out += std::string(labels.examples) + ": " + join(ctx.node->examples, ", ") + "\n";
    }
    return out;
}

std::vector<TraceEntry> to_trace(const std::vector<RetrievedContext>& contexts) {
    std::vector<TraceEntry> trace;
    trace.reserve(contexts.size());
    for (const auto& ctx : contexts) trace.push_back({ctx.node->name, ctx.score});
    return trace;
}

}  // namespace

PromptTemplate load_prompt_template(const std::string& path, const std::string& agent) {
    auto raw = read_file(path);
    std::string system_rules;
    std::string user_skeleton;
    int section = 0;  // 0 preamble, 1 system, 2 user
    for (const auto& line : split(raw, '\n')) {
        auto marker = trim(line);
        if (marker == "[system]") {
            section = 1;
            continue;
        }
        if (marker == "[user]") {
            section = 2;
            continue;
        }
        if (section == 1) {
            system_rules += line;
            system_rules += '\n';
        } else if (section == 2) {
            user_skeleton += line;
            user_skeleton += '\n';
        }
    }
    PromptTemplate tmpl;
    tmpl.agent = agent;
    tmpl.system_rules = trim(system_rules);
    tmpl.user_skeleton = trim(user_skeleton);
    if (tmpl.system_rules.empty() || tmpl.user_skeleton.empty())
        throw SchemaViolation("prompt template " + path + " needs [system] and [user] sections");
    return tmpl;
}

std::string fill_placeholders(const std::string& skeleton,
                              const std::map<std::string, std::string>& values) {
    std::string out = skeleton;
    for (const auto& [key, value] : values) {
        std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

PromptSet load_prompts(const std::string& prompts_dir) {
    auto base = std::filesystem::path(prompts_dir);
    PromptSet set;
    set.screening = load_prompt_template((base / "screening.txt").string(), "screening");
    set.flow = load_prompt_template((base / "flow_extraction.txt").string(), "flow");
    set.data_category = load_prompt_template((base / "data_category.txt").string(), "data_category");
    set.consumer_type = load_prompt_template((base / "consumer_type.txt").string(), "consumer_type");
    set.purpose = load_prompt_template((base / "purpose.txt").string(), "purpose");
    set.method = load_prompt_template((base / "method.txt").string(), "method");
    return set;
}

KnowledgeSet load_knowledge(const std::string& kb_dir) {
    auto base = std::filesystem::path(kb_dir);
    return KnowledgeSet{
        KnowledgeIndex(load_typology((base / "data_category.json").string())),
        KnowledgeIndex(load_typology((base / "consumer_type.json").string())),
        KnowledgeIndex(load_typology((base / "purpose.json").string())),
        KnowledgeIndex(load_typology((base / "method.json").string()))};
}

std::vector<DataFlow> expand_tuples(const std::vector<RawFlowTuple>& tuples,
                                    std::size_t segment_index) {
    std::vector<DataFlow> flows;
    for (const auto& tuple : tuples) {
        std::vector<std::optional<std::string>> senders;
        if (tuple.senders.empty())
            senders.push_back(std::nullopt);
        else
            for (const auto& sender : tuple.senders) senders.emplace_back(sender);
        std::vector<std::optional<std::string>> receivers;
        if (tuple.receivers.empty())
            receivers.push_back(std::nullopt);
        else
            for (const auto& receiver : tuple.receivers) receivers.emplace_back(receiver);

        for (const auto& sender : senders)
            for (const auto& type : tuple.types)
                for (const auto& receiver : receivers)
                    flows.push_back({sender, type, receiver, segment_index});
    }
    return flows;
}

std::string render_flow(const DataFlow& flow) {
    return flow.sender.value_or("unknown") + " → " + flow.data_type + " → " +
           flow.receiver.value_or("unknown");
}

AgentSuite::AgentSuite(Gateway& gateway, const KnowledgeSet& knowledge, const PromptSet& prompts,
                       AgentModels models, RetrievalPolicy policy, double temperature, double top_p)
    : gateway_(gateway),
      knowledge_(knowledge),
      prompts_(prompts),
      models_(std::move(models)),
      policy_(policy),
      temperature_(temperature),
      top_p_(top_p) {}

ChatRequest AgentSuite::make_request(const std::string& model, const PromptTemplate& tmpl,
                                     const std::map<std::string, std::string>& values) const {
    ChatRequest req;
    req.model = model;
    req.system_content = tmpl.system_rules;
    req.user_content = fill_placeholders(tmpl.user_skeleton, values);
    req.temperature = temperature_;
    req.top_p = top_p_;
    return req;
}

bool AgentSuite::screen(const Segment& segment) const {
    if (segment.text.empty())
        throw SchemaViolation("screen: segment text must be non-empty");
    auto response = gateway_.complete(
        make_request(models_.screening, prompts_.screening, {{"TEXT_SEGMENT", segment.text}}));
    return iequals(strip_code_fences(response.text), "yes");
}

std::vector<DataFlow> AgentSuite::extract_flows(const Segment& segment,
                                                std::string* parse_error) const {
    auto response = gateway_.complete(
        make_request(models_.flow, prompts_.flow, {{"TEXT_SEGMENT", segment.text}}));
    try {
        return expand_tuples(parse_flow_output(response.text), segment.index);
    } catch (const ParseFailure& failure) {
        if (parse_error != nullptr) *parse_error = failure.what();
        return {};
    }
}

Labeled AgentSuite::classify(const KnowledgeIndex& index, const std::string& query,
                             const PromptTemplate& tmpl, const std::string& model,
                             std::map<std::string, std::string> values,
                             const RetrievalPolicy& policy,
                             const std::vector<std::string>& allowed,
                             const std::string& repair) const {
    auto contexts = index.retrieve(query, policy);
    values["CONTEXTS"] = render_contexts(contexts);
    auto response = gateway_.complete(make_request(model, tmpl, values));

    Labeled out;
    out.trace = to_trace(contexts);
    try {
        out.label = parse_label_output(response.text, allowed);
    } catch (const LabelOutOfVocabulary&) {
        out.label = repair;
    }
    return out;
}

Labeled AgentSuite::classify_data_category(const DataFlow& flow, const Segment& segment) const {
    if (flow.data_type.empty())
        throw SchemaViolation("classify_data_category: data_type must be non-empty");
    return classify(knowledge_.data_category, flow.data_type, prompts_.data_category,
                    models_.data_category,
                    {{"INPUT_DATA_TYPE", flow.data_type}, {"TEXT_SEGMENT", segment.text}}, policy_,
                    knowledge_.data_category.typology().node_names(), "Other");
}

Labeled AgentSuite::classify_consumer_type(const DataFlow& flow, const Segment& segment) const {
    auto rendered = render_flow(flow);
    auto allowed = knowledge_.consumer_type.typology().node_names();
    allowed.push_back("Undefined");
    return classify(knowledge_.consumer_type, rendered + "\n" + segment.text,
                    prompts_.consumer_type, models_.consumer_type,
                    {{"INPUT_DATA_TYPE", rendered}, {"TEXT_SEGMENT", segment.text}}, policy_,
                    allowed, "Undefined");
}

Labeled AgentSuite::classify_purpose(const DataFlow& flow, const Segment& segment) const {
    (void)flow;
    return classify(knowledge_.purpose, segment.text, prompts_.purpose, models_.purpose,
                    {{"TEXT_SEGMENT", segment.text}}, policy_,
                    knowledge_.purpose.typology().node_names(), "Unspecified");
}

Labeled AgentSuite::classify_method(const DataFlow& flow, const Segment& segment,
                                    const Segment* prev, const Segment* next) const {
    (void)flow;
    std::string query;
    for (const Segment* part : {prev, &segment, next}) {
        if (part == nullptr) continue;
        if (!query.empty()) query += '\n';
        query += part->text;
    }
    // Only the single best context informs the method agent.
    RetrievalPolicy top_one{policy_.threshold, 1};
    return classify(knowledge_.method, query, prompts_.method, models_.method,
                    {{"PREV", prev != nullptr ? prev->text : ""},
                     {"TEXT_SEGMENT", segment.text},
                     {"NEXT", next != nullptr ? next->text : ""}},
                    top_one, knowledge_.method.typology().node_names(), "Unspecified");
}

FlowRecord AgentSuite::annotate(const DataFlow& flow, const Segment& segment, const Segment* prev,
                                const Segment* next) const {
    FlowRecord record;
    record.flow = flow;
    auto category = classify_data_category(flow, segment);
    record.data_category = category.label;
    record.retrieval_trace["data_category"] = std::move(category.trace);
    auto consumer = classify_consumer_type(flow, segment);
    record.consumer_type = consumer.label;
    record.retrieval_trace["consumer_type"] = std::move(consumer.trace);
    auto purpose = classify_purpose(flow, segment);
    record.purpose = purpose.label;
    record.retrieval_trace["purpose"] = std::move(purpose.trace);
    auto method = classify_method(flow, segment, prev, next);
    record.method = method.label;
    record.retrieval_trace["method"] = std::move(method.trace);
    return record;
}

PipelineResult run_pipeline(const PolicyDocument& doc, const AgentSuite& agents, int threads) {
    auto segments = segment_document(doc);
    std::vector<SegmentOutcome> outcomes(segments.size());

    auto process = [&](std::size_t i) {
        auto& outcome = outcomes[i];
        outcome.segment_index = segments[i].index;
        try {
            if (!agents.screen(segments[i])) {
                outcome.status = "screened_out";
                return;
            }
            std::string parse_error;
            auto flows = agents.extract_flows(segments[i], &parse_error);
            if (!parse_error.empty()) {
                outcome.status = "parse_failure";
                outcome.detail = parse_error;
                return;
            }
            auto nb = neighbors(segments, i);
            for (const auto& flow : flows)
                outcome.records.push_back(agents.annotate(flow, segments[i], nb.prev, nb.next));
            outcome.status = "ok";
        } catch (const ParseFailure& failure) {
            outcome.records.clear();
            outcome.status = "parse_failure";
            outcome.detail = failure.what();
        } catch (const MockMiss& miss) {
            outcome.records.clear();
            outcome.status = "backend_error";
            outcome.detail = miss.what();
        } catch (const BackendError& error) {
            outcome.records.clear();
            outcome.status = "backend_error";
            outcome.detail = error.what();
        }
    };

    int workers = std::min<int>(threads, static_cast<int>(segments.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < segments.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    auto i = cursor.fetch_add(1);
                    if (i >= segments.size()) break;
                    process(i);
                }
            });
        }
        for (auto& worker : pool) worker.join();
    }

    PipelineResult result;
    result.outcomes = std::move(outcomes);
    for (const auto& outcome : result.outcomes)
        for (const auto& record : outcome.records) result.records.push_back(record);
    return result;
}

}  // namespace policyflow
