#include "policyflow/analyser.hpp"

#include <algorithm>
#include <set>

#include "policyflow/errors.hpp"

namespace policyflow {

namespace {

const FlowCase kAllCases[] = {
    FlowCase::user_to_first,  FlowCase::first_to_first, FlowCase::third_to_first,
    FlowCase::user_to_third,  FlowCase::first_to_third, FlowCase::third_to_third,
    FlowCase::incomplete};

double freq_of(const FlowStats& stats, FlowCase flow_case) {
    auto it = stats.freq.find(flow_case);
    return it == stats.freq.end() ? 0.0 : it->second;
}

struct Component {
    double weight;
    double (*value)(const FlowStats&);
};

double score_family(const FlowStats& stats, const std::vector<FlowStats>& corpus,
                    const std::vector<Component>& components) {
    double numerator = 0.0;
    double denominator = 0.0;
    for (const auto& component : components) {
        double maximum = 0.0;
        for (const auto& other : corpus) {
            if (other.zero_flows()) continue;
            maximum = std::max(maximum, component.value(other));
        }
        numerator += component.weight * component.value(stats);
        denominator += component.weight * maximum;
    }
    return denominator == 0.0 ? 0.0 : numerator / denominator;
}

}  // namespace

double FlowStats::first_party_total() const {
    return freq_of(*this, FlowCase::user_to_first) + freq_of(*this, FlowCase::first_to_first) +
           freq_of(*this, FlowCase::third_to_first);
}

double FlowStats::third_party_total() const {
    return freq_of(*this, FlowCase::user_to_third) + freq_of(*this, FlowCase::first_to_third) +
           freq_of(*this, FlowCase::third_to_third);
}

FlowStats compute_flow_stats(const std::string& policy_id,
                             const std::vector<ParsedFlow>& flows) {
    FlowStats stats;
    stats.policy_id = policy_id;
    stats.total_flows = flows.size();
    for (auto flow_case : kAllCases) stats.freq[flow_case] = 0.0;
    if (flows.empty()) return stats;
    for (const auto& flow : flows) stats.freq[flow.flow_case] += 1.0;
    for (auto& [flow_case, value] : stats.freq)
        value /= static_cast<double>(stats.total_flows);
    return stats;
}

std::vector<RiskScores> compute_risk_scores(const std::vector<FlowStats>& corpus,
                                            const RiskWeights& weights) {
    if (corpus.empty()) throw EmptyCorpus("risk scoring needs at least one policy");

    const std::vector<Component> first_family = {
        {weights.user_to_first,
         [](const FlowStats& s) { return freq_of(s, FlowCase::user_to_first); }},
        {weights.first_to_first,
         [](const FlowStats& s) { return freq_of(s, FlowCase::first_to_first); }},
        {weights.third_to_first,
         [](const FlowStats& s) { return freq_of(s, FlowCase::third_to_first); }},
    };
    const std::vector<Component> third_family = {
        {weights.user_to_third,
         [](const FlowStats& s) { return freq_of(s, FlowCase::user_to_third); }},
        {weights.first_to_third,
         [](const FlowStats& s) { return freq_of(s, FlowCase::first_to_third); }},
        {weights.third_to_third,
         [](const FlowStats& s) { return freq_of(s, FlowCase::third_to_third); }},
    };
    const std::vector<Component> overall = {
        {weights.overall_first, [](const FlowStats& s) { return s.first_party_total(); }},
        {weights.overall_third, [](const FlowStats& s) { return s.third_party_total(); }},
        {weights.overall_incomplete,
         [](const FlowStats& s) { return freq_of(s, FlowCase::incomplete); }},
    };

    std::vector<RiskScores> scores;
    scores.reserve(corpus.size());
    for (const auto& stats : corpus) {
        RiskScores entry;
        entry.policy_id = stats.policy_id;
        if (!stats.zero_flows()) {
            entry.first_party_score = score_family(stats, corpus, first_family);
            entry.third_party_score = score_family(stats, corpus, third_family);
            entry.overall_score = score_family(stats, corpus, overall);
        }
        scores.push_back(std::move(entry));
    }
    return scores;
}

std::map<std::string, std::size_t> category_distribution(
    const std::vector<ParsedFlow>& flows) {
    std::map<std::string, std::set<std::string>> types;
    for (const auto& flow : flows)
        types[flow.data_category].insert(normalize_entity(flow.data_type));
    std::map<std::string, std::size_t> distribution;
    for (const auto& [category, names] : types) distribution[category] = names.size();
    return distribution;
}

std::map<std::pair<std::string, std::string>, std::size_t> category_purpose_matrix(
    const std::vector<ParsedFlow>& flows) {
    std::map<std::pair<std::string, std::string>, std::size_t> matrix;
    for (const auto& flow : flows) ++matrix[{flow.data_category, flow.purpose}];
    return matrix;
}

NetworkSummary network_summary(const DataFlowGraph& graph) {
    NetworkSummary summary;
    summary.edges = graph.edges.size();
    for (const auto& node : graph.nodes) {
        if (node.role == NodeRole::data_type) {
            ++summary.data_type_nodes;
            continue;
        }
        switch (node.attribute.value_or(PartyAttribute::unknown)) {
            case PartyAttribute::first_party: ++summary.first_party_nodes; break;
            case PartyAttribute::third_party: ++summary.third_party_nodes; break;
            case PartyAttribute::user_party: ++summary.user_party_nodes; break;
            case PartyAttribute::unknown: ++summary.unknown_party_nodes; break;
        }
    }
    return summary;
}

}  // namespace policyflow
