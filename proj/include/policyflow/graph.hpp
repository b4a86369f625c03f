#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "policyflow/flow_parser.hpp"

namespace policyflow {

enum class NodeRole { party, data_type };

std::string_view node_role_name(NodeRole role);

struct GraphNode {
    std::string id;
    NodeRole role = NodeRole::party;
    // Present for party nodes, absent for data-type nodes.
    std::optional<PartyAttribute> attribute;

    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    std::string from;
    std::string to;
    std::string purpose;
    std::vector<std::size_t> segments;

    bool operator==(const GraphEdge&) const = default;
};

// Directed bipartite data-flow graph. Every edge connects a party node with a
// data-type node; parallel edges between the same endpoints carry distinct
// purposes. Nodes are kept sorted by id and edges by (from, to, purpose) so
// exports are bit-stable.
struct DataFlowGraph {
    std::string policy_id;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    const GraphNode* find_node(const std::string& id) const;

    bool operator==(const DataFlowGraph&) const = default;
};

// Each flow contributes sender -> data_type and data_type -> receiver edges
// tagged with the flow's purpose. Missing endpoints materialize as the party
// node "unknown". A data type whose name collides with a party id gets the
// suffix " (data type)" so ids stay unique with a fixed role.
DataFlowGraph build_graph(const std::vector<ParsedFlow>& flows,
                          const std::string& policy_id = "");

// Normalized centralities on the directed graph with unit arc weights.
// Parallel purpose edges collapse to a single arc for path computations.
// degree = (in + out) / (M - 1); closeness is the Wasserman-Faust scaled
// closeness over incoming distances; betweenness is Brandes normalized by
// (M - 1)(M - 2). Graphs with fewer than two nodes score zero everywhere.
std::map<std::string, double> degree_centrality(const DataFlowGraph& graph);
std::map<std::string, double> closeness_centrality(const DataFlowGraph& graph);
std::map<std::string, double> betweenness_centrality(const DataFlowGraph& graph);

enum class CentralityMetric { degree, closeness, betweenness };

// Descending by score, ties broken lexicographically by node id.
std::vector<std::pair<std::string, double>> top_k(const DataFlowGraph& graph,
                                                  CentralityMetric metric,
                                                  std::size_t k);

enum class ExportFormat { json, dot, html };

// json is full fidelity and round-trips through graph_from_json; dot colors
// nodes by attribute class and edges by purpose; html embeds the json payload
// verbatim inside a self-contained force-layout viewer page.
std::string export_graph(const DataFlowGraph& graph, ExportFormat format);

DataFlowGraph graph_from_json(const std::string& text);

}  // namespace policyflow
