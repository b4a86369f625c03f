#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/graph.hpp"
#include "test_support.hpp"

using namespace policyflow;

namespace {

ParsedFlow make_flow(std::optional<std::string> sender, std::string data_type,
                     std::optional<std::string> receiver, PartyAttribute sender_party,
                     PartyAttribute receiver_party, std::string purpose,
                     std::size_t segment_index) {
    ParsedFlow flow;
    flow.sender = std::move(sender);
    flow.data_type = std::move(data_type);
    flow.receiver = std::move(receiver);
    flow.sender_party = sender_party;
    flow.receiver_party = receiver_party;
    flow.flow_case = classify_flow_case(sender_party, receiver_party);
    flow.data_category = "Contact";
    flow.consumer_type = "First Party";
    flow.purpose = std::move(purpose);
    flow.method = "Active";
    flow.segment_index = segment_index;
    flow.provenance = {segment_index};
    return flow;
}

// Distinct-arc adjacency with parallel purpose edges collapsed, the path
// convention the centrality contract specifies.
struct ArcView {
    std::vector<std::string> ids;
    std::map<std::string, std::size_t> index;
    std::vector<std::set<std::size_t>> out;
    std::vector<std::set<std::size_t>> in;

    explicit ArcView(const DataFlowGraph& graph) {
        for (const auto& node : graph.nodes) {
            index.emplace(node.id, ids.size());
            ids.push_back(node.id);
        }
        out.resize(ids.size());
        in.resize(ids.size());
        for (const auto& edge : graph.edges) {
            auto from = index.at(edge.from);
            auto to = index.at(edge.to);
            out[from].insert(to);
            in[to].insert(from);
        }
    }
};

constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

std::vector<std::size_t> bfs_distances(const ArcView& view, std::size_t source) {
    std::vector<std::size_t> dist(view.ids.size(), kUnreachable);
    dist[source] = 0;
    std::deque<std::size_t> queue = {source};
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto v : view.out[u]) {
            if (dist[v] != kUnreachable) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

std::map<std::string, double> oracle_degree(const DataFlowGraph& graph) {
    ArcView view(graph);
    std::map<std::string, double> scores;
    auto M = view.ids.size();
    for (std::size_t u = 0; u < M; ++u) {
        double raw = static_cast<double>(view.out[u].size() + view.in[u].size());
        scores[view.ids[u]] = M < 2 ? 0.0 : raw / static_cast<double>(M - 1);
    }
    return scores;
}

std::map<std::string, double> oracle_closeness(const DataFlowGraph& graph) {
    ArcView view(graph);
    auto M = view.ids.size();
    std::vector<std::vector<std::size_t>> dist;
    dist.reserve(M);
    for (std::size_t s = 0; s < M; ++s) dist.push_back(bfs_distances(view, s));
    std::map<std::string, double> scores;
    for (std::size_t u = 0; u < M; ++u) {
        double reach = 0.0;
        double total = 0.0;
        for (std::size_t s = 0; s < M; ++s) {
            if (s == u || dist[s][u] == kUnreachable) continue;
            reach += 1.0;
            total += static_cast<double>(dist[s][u]);
        }
        if (M < 2 || reach == 0.0 || total == 0.0) {
            scores[view.ids[u]] = 0.0;
            continue;
        }
        scores[view.ids[u]] = (reach / total) * (reach / static_cast<double>(M - 1));
    }
    return scores;
}

// Exhaustive simple-path enumeration: collects the length of every simple
// directed path from s to t, then counts the shortest ones and how many pass
// through each interior node. Independent of Brandes.
void enumerate_paths(const ArcView& view, std::size_t current, std::size_t target,
                     std::vector<bool>& visited, std::vector<std::size_t>& trail,
                     std::vector<std::vector<std::size_t>>& found) {
    if (current == target) {
        found.push_back(trail);
        return;
    }
    for (auto next : view.out[current]) {
        if (visited[next]) continue;
        visited[next] = true;
        trail.push_back(next);
        enumerate_paths(view, next, target, visited, trail, found);
        trail.pop_back();
        visited[next] = false;
    }
}

std::map<std::string, double> oracle_betweenness(const DataFlowGraph& graph) {
    ArcView view(graph);
    auto M = view.ids.size();
    std::map<std::string, double> scores;
    for (const auto& id : view.ids) scores[id] = 0.0;
    if (M < 3) return scores;
    for (std::size_t s = 0; s < M; ++s) {
        for (std::size_t t = 0; t < M; ++t) {
            if (s == t) continue;
            std::vector<bool> visited(M, false);
            visited[s] = true;
            std::vector<std::size_t> trail = {s};
            std::vector<std::vector<std::size_t>> found;
            enumerate_paths(view, s, t, visited, trail, found);
            if (found.empty()) continue;
            std::size_t shortest = kUnreachable;
            for (const auto& path : found) shortest = std::min(shortest, path.size());
            std::map<std::size_t, std::size_t> through;
            std::size_t sigma = 0;
            for (const auto& path : found) {
                if (path.size() != shortest) continue;
                ++sigma;
                for (std::size_t i = 1; i + 1 < path.size(); ++i) ++through[path[i]];
            }
            for (const auto& [node, count] : through)
                scores[view.ids[node]] +=
                    static_cast<double>(count) / static_cast<double>(sigma);
        }
    }
    double norm = static_cast<double>(M - 1) * static_cast<double>(M - 2);
    for (auto& [id, value] : scores) value /= norm;
    return scores;
}

void require_close(const std::map<std::string, double>& got,
                   const std::map<std::string, double>& want) {
    REQUIRE(got.size() == want.size());
    for (const auto& [id, value] : want) {
        REQUIRE(got.count(id) == 1);
        REQUIRE(std::abs(got.at(id) - value) < 1e-9);
    }
}

DataFlowGraph path_graph() {
    DataFlowGraph graph;
    graph.policy_id = "path";
    graph.nodes = {
        {"A", NodeRole::party, PartyAttribute::user_party},
        {"B", NodeRole::data_type, std::nullopt},
        {"C", NodeRole::party, PartyAttribute::first_party},
    };
    graph.edges = {
        {"A", "B", "Unspecified", {0}},
        {"B", "C", "Unspecified", {0}},
    };
    return graph;
}

}  // namespace

TEST_CASE("centralities match the published path-graph values") {
    auto graph = path_graph();

    auto degree = degree_centrality(graph);
    REQUIRE(degree.at("A") == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(degree.at("B") == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(degree.at("C") == doctest::Approx(0.5).epsilon(1e-12));

    auto closeness = closeness_centrality(graph);
    REQUIRE(closeness.at("A") == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(closeness.at("B") == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(closeness.at("C") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    auto betweenness = betweenness_centrality(graph);
    REQUIRE(betweenness.at("A") == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(betweenness.at("B") == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(betweenness.at("C") == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate graphs score zero everywhere") {
    SUBCASE("single node") {
        DataFlowGraph graph;
        graph.nodes = {{"solo", NodeRole::party, PartyAttribute::first_party}};
        REQUIRE(degree_centrality(graph).at("solo") == 0.0);
        REQUIRE(closeness_centrality(graph).at("solo") == 0.0);
        REQUIRE(betweenness_centrality(graph).at("solo") == 0.0);
    }
    SUBCASE("two isolated nodes") {
        DataFlowGraph graph;
        graph.nodes = {{"left", NodeRole::party, PartyAttribute::first_party},
                       {"right", NodeRole::data_type, std::nullopt}};
        for (const auto& [id, value] : degree_centrality(graph)) REQUIRE(value == 0.0);
        for (const auto& [id, value] : closeness_centrality(graph)) REQUIRE(value == 0.0);
        for (const auto& [id, value] : betweenness_centrality(graph)) REQUIRE(value == 0.0);
    }
    SUBCASE("empty graph") {
        DataFlowGraph graph;
        REQUIRE(degree_centrality(graph).empty());
        REQUIRE(closeness_centrality(graph).empty());
        REQUIRE(betweenness_centrality(graph).empty());
    }
}

TEST_CASE("star graph degree matches the direct count") {
    // One party feeding k data types: party degree = k / (M - 1).
    const std::size_t k = 5;
    DataFlowGraph graph;
    graph.nodes.push_back({"hub", NodeRole::party, PartyAttribute::first_party});
    for (std::size_t i = 0; i < k; ++i) {
        std::string id = "leaf" + std::to_string(i);
        graph.nodes.push_back({id, NodeRole::data_type, std::nullopt});
        graph.edges.push_back({"hub", id, "Unspecified", {0}});
    }
    std::sort(graph.nodes.begin(), graph.nodes.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    auto degree = degree_centrality(graph);
    REQUIRE(degree.at("hub") ==
            doctest::Approx(static_cast<double>(k) / (k + 1 - 1)).epsilon(1e-12));
    for (std::size_t i = 0; i < k; ++i)
        REQUIRE(degree.at("leaf" + std::to_string(i)) ==
                doctest::Approx(1.0 / k).epsilon(1e-12));
}

TEST_CASE("parallel purpose edges collapse to one arc for path metrics") {
    auto graph = path_graph();
    graph.edges.push_back({"A", "B", "Advertising", {3}});
    std::sort(graph.edges.begin(), graph.edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.from, a.to, a.purpose) < std::tie(b.from, b.to, b.purpose);
    });
    auto degree = degree_centrality(graph);
    REQUIRE(degree.at("A") == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(degree.at("B") == doctest::Approx(1.0).epsilon(1e-12));
    auto betweenness = betweenness_centrality(graph);
    REQUIRE(betweenness.at("B") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("centralities match the brute-force oracle on random bipartite digraphs") {
    std::mt19937 rng(20250819u);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t M = 2 + rng() % 7;
        std::size_t parties = 1 + rng() % (M - 1);
        std::size_t data_types = M - parties;
        if (data_types == 0) {
            parties -= 1;
            data_types = 1;
        }

        DataFlowGraph graph;
        graph.policy_id = "trial" + std::to_string(trial);
        const PartyAttribute attributes[] = {
            PartyAttribute::first_party, PartyAttribute::third_party,
            PartyAttribute::user_party, PartyAttribute::unknown};
        for (std::size_t i = 0; i < parties; ++i)
            graph.nodes.push_back(
                {"p" + std::to_string(i), NodeRole::party, attributes[i % 4]});
        for (std::size_t i = 0; i < data_types; ++i)
            graph.nodes.push_back({"d" + std::to_string(i), NodeRole::data_type, std::nullopt});
        std::sort(graph.nodes.begin(), graph.nodes.end(),
                  [](const auto& a, const auto& b) { return a.id < b.id; });

        for (std::size_t p = 0; p < parties; ++p) {
            for (std::size_t d = 0; d < data_types; ++d) {
                std::string party = "p" + std::to_string(p);
                std::string data = "d" + std::to_string(d);
                if (coin(rng) < 0.4) {
                    graph.edges.push_back({party, data, "Unspecified", {p}});
                    if (coin(rng) < 0.15)
                        graph.edges.push_back({party, data, "Advertising", {p + 1}});
                }
                if (coin(rng) < 0.4) graph.edges.push_back({data, party, "Unspecified", {d}});
            }
        }
        std::sort(graph.edges.begin(), graph.edges.end(), [](const auto& a, const auto& b) {
            return std::tie(a.from, a.to, a.purpose) < std::tie(b.from, b.to, b.purpose);
        });

        CAPTURE(trial);
        require_close(degree_centrality(graph), oracle_degree(graph));
        require_close(closeness_centrality(graph), oracle_closeness(graph));
        require_close(betweenness_centrality(graph), oracle_betweenness(graph));
    }
}

TEST_CASE("build_graph shapes nodes and edges from parsed flows") {
    SUBCASE("minimal flow yields three nodes and two edges") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "email address", std::string("we"),
                      PartyAttribute::user_party, PartyAttribute::first_party,
                      "Basic Service or Feature", 0),
        };
        auto graph = build_graph(flows, "minimal");
        REQUIRE(graph.policy_id == "minimal");
        REQUIRE(graph.nodes.size() == 3);
        REQUIRE(graph.edges.size() == 2);

        const auto* data = graph.find_node("email address");
        REQUIRE(data != nullptr);
        REQUIRE(data->role == NodeRole::data_type);
        REQUIRE_FALSE(data->attribute.has_value());
        const auto* we = graph.find_node("we");
        REQUIRE(we != nullptr);
        REQUIRE(we->role == NodeRole::party);
        REQUIRE(we->attribute == PartyAttribute::first_party);
        const auto* you = graph.find_node("you");
        REQUIRE(you != nullptr);
        REQUIRE(you->attribute == PartyAttribute::user_party);

        REQUIRE(graph.edges[0] ==
                GraphEdge{"email address", "we", "Basic Service or Feature", {0}});
        REQUIRE(graph.edges[1] ==
                GraphEdge{"you", "email address", "Basic Service or Feature", {0}});
    }

    SUBCASE("missing endpoints materialize as the unknown party node") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::nullopt, "cookie", std::string("acme"), PartyAttribute::unknown,
                      PartyAttribute::third_party, "Advertising", 2),
            make_flow(std::string("you"), "location", std::nullopt, PartyAttribute::user_party,
                      PartyAttribute::unknown, "Unspecified", 3),
        };
        auto graph = build_graph(flows, "gaps");
        const auto* unknown = graph.find_node("unknown");
        REQUIRE(unknown != nullptr);
        REQUIRE(unknown->role == NodeRole::party);
        REQUIRE(unknown->attribute == PartyAttribute::unknown);
        bool found_in = false;
        bool found_out = false;
        for (const auto& edge : graph.edges) {
            if (edge.from == "unknown" && edge.to == "cookie") found_out = true;
            if (edge.from == "location" && edge.to == "unknown") found_in = true;
        }
        REQUIRE(found_out);
        REQUIRE(found_in);
    }

    SUBCASE("shared data types merge into one node") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "vin", std::string("honda"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Unspecified", 0),
            make_flow(std::string("honda"), "vin", std::string("panasonic"),
                      PartyAttribute::first_party, PartyAttribute::third_party, "Marketing", 1),
        };
        auto graph = build_graph(flows, "vin");
        std::size_t vin_nodes = 0;
        for (const auto& node : graph.nodes)
            if (node.id == "vin") ++vin_nodes;
        REQUIRE(vin_nodes == 1);
        REQUIRE(graph.nodes.size() == 4);
        REQUIRE(graph.edges.size() == 4);
    }

    SUBCASE("same endpoints with distinct purposes keep parallel edges") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "email address", std::string("we"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Marketing", 0),
            make_flow(std::string("you"), "email address", std::string("we"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Advertising", 1),
        };
        auto graph = build_graph(flows, "parallel");
        REQUIRE(graph.edges.size() == 4);
    }

    SUBCASE("same endpoints and purpose merge provenance") {
        auto one = make_flow(std::string("you"), "email address", std::string("we"),
                             PartyAttribute::user_party, PartyAttribute::first_party,
                             "Marketing", 0);
        auto two = make_flow(std::string("you"), "email address", std::string("we"),
                             PartyAttribute::user_party, PartyAttribute::first_party,
                             "Marketing", 4);
        two.data_category = "Online Identifier";
        std::vector<ParsedFlow> flows = {one, two};
        auto graph = build_graph(flows, "merge");
        REQUIRE(graph.edges.size() == 2);
        for (const auto& edge : graph.edges)
            REQUIRE(edge.segments == std::vector<std::size_t>{0, 4});
    }

    SUBCASE("data type colliding with a party id gets a suffix") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "honda", std::string("honda"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Unspecified", 0),
        };
        auto graph = build_graph(flows, "collision");
        const auto* party = graph.find_node("honda");
        REQUIRE(party != nullptr);
        REQUIRE(party->role == NodeRole::party);
        const auto* data = graph.find_node("honda (data type)");
        REQUIRE(data != nullptr);
        REQUIRE(data->role == NodeRole::data_type);
        bool into_party = false;
        for (const auto& edge : graph.edges)
            if (edge.from == "honda (data type)" && edge.to == "honda") into_party = true;
        REQUIRE(into_party);
    }

    SUBCASE("bipartite discipline and degree balance hold") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "vin", std::string("honda"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Unspecified", 0),
            make_flow(std::nullopt, "cookie", std::string("acme"), PartyAttribute::unknown,
                      PartyAttribute::third_party, "Advertising", 1),
            make_flow(std::string("honda"), "vin", std::string("panasonic"),
                      PartyAttribute::first_party, PartyAttribute::third_party, "Marketing", 2),
        };
        auto graph = build_graph(flows, "discipline");
        std::map<std::string, NodeRole> roles;
        for (const auto& node : graph.nodes) roles[node.id] = node.role;
        std::set<std::pair<std::string, std::string>> arcs;
        for (const auto& edge : graph.edges) {
            REQUIRE(roles.at(edge.from) != roles.at(edge.to));
            arcs.emplace(edge.from, edge.to);
        }
        auto degree = degree_centrality(graph);
        REQUIRE(arcs.size() == graph.edges.size());
        double degree_sum = 0.0;
        for (const auto& [id, value] : degree) degree_sum += value;
        REQUIRE(degree_sum ==
                doctest::Approx(2.0 * static_cast<double>(arcs.size()) /
                                static_cast<double>(graph.nodes.size() - 1))
                    .epsilon(1e-12));
    }

    SUBCASE("node and edge order is independent of input order") {
        std::vector<ParsedFlow> flows = {
            make_flow(std::string("you"), "vin", std::string("honda"),
                      PartyAttribute::user_party, PartyAttribute::first_party, "Unspecified", 0),
            make_flow(std::string("honda"), "cookie", std::string("acme"),
                      PartyAttribute::first_party, PartyAttribute::third_party, "Advertising", 1),
        };
        auto forward = build_graph(flows, "stable");
        std::reverse(flows.begin(), flows.end());
        auto backward = build_graph(flows, "stable");
        REQUIRE(forward == backward);
    }
}

TEST_CASE("top_k orders by score then id") {
    auto graph = path_graph();
    SUBCASE("path betweenness k=1 picks the middle node") {
        auto top = top_k(graph, CentralityMetric::betweenness, 1);
        REQUIRE(top.size() == 1);
        REQUIRE(top[0].first == "B");
        REQUIRE(top[0].second == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("k larger than M returns all nodes") {
        auto top = top_k(graph, CentralityMetric::degree, 10);
        REQUIRE(top.size() == 3);
        REQUIRE(top[0].first == "B");
    }
    SUBCASE("equal scores fall back to lexicographic ids") {
        auto top = top_k(graph, CentralityMetric::degree, 3);
        REQUIRE(top[0].first == "B");
        REQUIRE(top[1].first == "A");
        REQUIRE(top[2].first == "C");
    }
}

TEST_CASE("graph exports") {
    auto graph = path_graph();

    SUBCASE("json round-trips losslessly") {
        auto text = export_graph(graph, ExportFormat::json);
        auto back = graph_from_json(text);
        REQUIRE(back == graph);
    }

    SUBCASE("json carries the documented schema") {
        auto parsed = nlohmann::json::parse(export_graph(graph, ExportFormat::json));
        REQUIRE(parsed.at("policy_id") == "path");
        REQUIRE(parsed.at("nodes").size() == 3);
        REQUIRE(parsed.at("nodes")[0].at("id") == "A");
        REQUIRE(parsed.at("nodes")[0].at("role") == "party");
        REQUIRE(parsed.at("nodes")[0].at("attribute") == "user_party");
        REQUIRE_FALSE(parsed.at("nodes")[1].contains("attribute"));
        REQUIRE(parsed.at("edges")[0].at("from") == "A");
        REQUIRE(parsed.at("edges")[0].at("segments") == nlohmann::json::array({0}));
    }

    SUBCASE("dot output lists every node and edge once") {
        auto text = export_graph(graph, ExportFormat::dot);
        std::size_t node_statements = 0;
        std::size_t edge_statements = 0;
        std::size_t position = 0;
        while ((position = text.find("\n  \"", position)) != std::string::npos) {
            auto line_end = text.find('\n', position + 1);
            auto line = text.substr(position + 1, line_end - position - 1);
            if (line.find("->") != std::string::npos)
                ++edge_statements;
            else
                ++node_statements;
            position = line_end;
        }
        REQUIRE(node_statements == 3);
        REQUIRE(edge_statements == 2);
        REQUIRE(text.rfind("digraph", 0) == 0);
    }

    SUBCASE("dot colors party classes differently") {
        auto text = export_graph(graph, ExportFormat::dot);
        REQUIRE(text.find("\"A\"") != std::string::npos);
        auto line_for = [&](const std::string& id) {
            auto start = text.find("\"" + id + "\" [");
            REQUIRE(start != std::string::npos);
            return text.substr(start, text.find('\n', start) - start);
        };
        REQUIRE(line_for("A") != line_for("C"));
    }

    SUBCASE("html embeds the json payload verbatim") {
        auto json_text = export_graph(graph, ExportFormat::json);
        auto html_text = export_graph(graph, ExportFormat::html);
        REQUIRE(html_text.find(json_text) != std::string::npos);
        REQUIRE(html_text.find("<script") != std::string::npos);
    }

    SUBCASE("exports are bit-stable") {
        REQUIRE(export_graph(graph, ExportFormat::json) ==
                export_graph(graph, ExportFormat::json));
        REQUIRE(export_graph(graph, ExportFormat::dot) ==
                export_graph(graph, ExportFormat::dot));
        REQUIRE(export_graph(graph, ExportFormat::html) ==
                export_graph(graph, ExportFormat::html));
    }

    SUBCASE("unsupported format throws") {
        REQUIRE_THROWS_AS(export_graph(graph, static_cast<ExportFormat>(99)),
                          UnsupportedFormat);
    }

    SUBCASE("malformed json import throws") {
        REQUIRE_THROWS_AS(graph_from_json("not json"), SchemaViolation);
        REQUIRE_THROWS_AS(graph_from_json("{}"), SchemaViolation);
        REQUIRE_THROWS_AS(
            graph_from_json(R"({"policy_id":"x","nodes":[{"id":"a","role":"widget"}],"edges":[]})"),
            SchemaViolation);
    }
}
