#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "policyflow/flow_parser.hpp"
#include "policyflow/graph.hpp"

namespace policyflow {

// Per-policy flow-case frequencies. freq carries every FlowCase key; the
// incomplete entry aggregates all unattributable sub-cases. When total_flows
// is zero all frequencies are zero and zero_flows() marks the policy.
struct FlowStats {
    std::string policy_id;
    std::size_t total_flows = 0;
    std::map<FlowCase, double> freq;

    bool zero_flows() const { return total_flows == 0; }
    double first_party_total() const;
    double third_party_total() const;

    bool operator==(const FlowStats&) const = default;
};

FlowStats compute_flow_stats(const std::string& policy_id,
                             const std::vector<ParsedFlow>& flows);

// Weighted-sum risk scoring. The family weights apply to the three sub-case
// frequencies of each family; the overall weights apply to (first-party total,
// third-party total, incomplete).
struct RiskWeights {
    double user_to_first = 1.0;
    double first_to_first = 1.5;
    double third_to_first = 2.25;

    double user_to_third = 1.0;
    double first_to_third = 1.5;
    double third_to_third = 2.25;

    double overall_first = 1.0;
    double overall_third = 1.5;
    double overall_incomplete = 2.25;

    bool operator==(const RiskWeights&) const = default;
};

struct RiskScores {
    std::string policy_id;
    double first_party_score = 0.0;
    double third_party_score = 0.0;
    double overall_score = 0.0;

    bool operator==(const RiskScores&) const = default;
};

// Max-normalized scores: numerator is the policy's weighted component sum,
// denominator the weighted sum of per-component corpus maxima. Policies with
// zero flows are excluded from the maxima; a zero denominator scores 0.
// Output order matches input order. Throws EmptyCorpus on empty input.
std::vector<RiskScores> compute_risk_scores(const std::vector<FlowStats>& corpus,
                                            const RiskWeights& weights = {});

// Distinct normalized data types per data category for one policy's flows.
std::map<std::string, std::size_t> category_distribution(
    const std::vector<ParsedFlow>& flows);

// (data category, purpose) -> flow count, aggregated across the given flows.
std::map<std::pair<std::string, std::string>, std::size_t> category_purpose_matrix(
    const std::vector<ParsedFlow>& flows);

struct NetworkSummary {
    std::size_t edges = 0;
    std::size_t first_party_nodes = 0;
    std::size_t third_party_nodes = 0;
    std::size_t user_party_nodes = 0;
    std::size_t unknown_party_nodes = 0;
    std::size_t data_type_nodes = 0;

    bool operator==(const NetworkSummary&) const = default;
};

NetworkSummary network_summary(const DataFlowGraph& graph);

}  // namespace policyflow
