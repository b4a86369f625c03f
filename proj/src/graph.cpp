#include "policyflow/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

// Indexed adjacency with parallel purpose edges collapsed to simple arcs.
struct Adjacency {
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::vector<std::size_t>> in;

    explicit Adjacency(const DataFlowGraph& graph) {
        std::map<std::string, std::size_t> index;
        for (const auto& node : graph.nodes) {
            index.emplace(node.id, ids.size());
            ids.push_back(node.id);
        }
        std::vector<std::set<std::size_t>> out_sets(ids.size());
        std::vector<std::set<std::size_t>> in_sets(ids.size());
        for (const auto& edge : graph.edges) {
            auto from = index.at(edge.from);
            auto to = index.at(edge.to);
            out_sets[from].insert(to);
            in_sets[to].insert(from);
        }
        out.reserve(ids.size());
        in.reserve(ids.size());
        for (auto& s : out_sets) out.emplace_back(s.begin(), s.end());
        for (auto& s : in_sets) in.emplace_back(s.begin(), s.end());
    }
};

PartyAttribute attribute_from_name(const std::string& name) {
    if (name == "first_party") return PartyAttribute::first_party;
    if (name == "third_party") return PartyAttribute::third_party;
    if (name == "user_party") return PartyAttribute::user_party;
    if (name == "unknown") return PartyAttribute::unknown;
    throw SchemaViolation("unknown party attribute: " + name);
}

std::string dot_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string node_fill(const GraphNode& node) {
    if (node.role == NodeRole::data_type) return "#ffd966";
    switch (node.attribute.value_or(PartyAttribute::unknown)) {
        case PartyAttribute::first_party: return "#6fa8dc";
        case PartyAttribute::third_party: return "#e06666";
        case PartyAttribute::user_party: return "#93c47d";
        case PartyAttribute::unknown: break;
    }
    return "#cccccc";
}

std::string purpose_color(const std::string& purpose) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};
    return palette[fnv1a64(purpose) % 10];
}

nlohmann::ordered_json graph_to_json(const DataFlowGraph& graph) {
    nlohmann::ordered_json doc;
    doc["policy_id"] = graph.policy_id;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : graph.nodes) {
        nlohmann::ordered_json item;
        item["id"] = node.id;
        item["role"] = std::string(node_role_name(node.role));
        if (node.attribute.has_value())
            item["attribute"] = std::string(party_attribute_name(*node.attribute));
        doc["nodes"].push_back(std::move(item));
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& edge : graph.edges) {
        nlohmann::ordered_json item;
        item["from"] = edge.from;
        item["to"] = edge.to;
        item["purpose"] = edge.purpose;
        item["segments"] = edge.segments;
        doc["edges"].push_back(std::move(item));
    }
    return doc;
}

std::string export_dot(const DataFlowGraph& graph) {
    std::ostringstream out;
    out << "digraph \"" << dot_escape(graph.policy_id) << "\" {\n";
    out << "  rankdir=LR;\n";
    out << "  node [style=filled];\n";
    for (const auto& node : graph.nodes) {
        out << "  \"" << dot_escape(node.id) << "\" [shape="
            << (node.role == NodeRole::data_type ? "box" : "ellipse")
            << ", fillcolor=\"" << node_fill(node) << "\"];\n";
    }
    for (const auto& edge : graph.edges) {
        out << "  \"" << dot_escape(edge.from) << "\" -> \"" << dot_escape(edge.to)
            << "\" [color=\"" << purpose_color(edge.purpose) << "\", label=\""
            << dot_escape(edge.purpose) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_html(const DataFlowGraph& graph) {
    auto payload = graph_to_json(graph).dump(2);
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
        << graph.policy_id << " data flow network</title>\n"
        << "<style>\n"
        << "body { margin: 0; font-family: sans-serif; }\n"
        << "#view { width: 100vw; height: 100vh; display: block; }\n"
        << "</style>\n</head>\n<body>\n<canvas id=\"view\"></canvas>\n"
        << "<script id=\"graph-data\" type=\"application/json\">\n"
        << payload << "\n</script>\n<script>\n"
        << R"JS(const graph = JSON.parse(document.getElementById('graph-data').textContent);
const canvas = document.getElementById('view');
const ctx = canvas.getContext('2d');
const fills = {first_party: '#6fa8dc', third_party: '#e06666', user_party: '#93c47d', unknown: '#cccccc'};
const nodes = graph.nodes.map((n, i) => ({
  id: n.id,
  fill: n.role === 'data_type' ? '#ffd966' : (fills[n.attribute] || '#cccccc'),
  x: Math.cos(i * 2.399) * 200 + 400,
  y: Math.sin(i * 2.399) * 200 + 300,
  vx: 0, vy: 0
}));
const byId = Object.fromEntries(nodes.map(n => [n.id, n]));
const links = graph.edges.map(e => ({from: byId[e.from], to: byId[e.to], purpose: e.purpose}));
function resize() { canvas.width = innerWidth; canvas.height = innerHeight; }
addEventListener('resize', resize);
resize();
function step() {
  for (const a of nodes) {
    for (const b of nodes) {
      if (a === b) continue;
      const dx = a.x - b.x, dy = a.y - b.y;
      const d2 = Math.max(dx * dx + dy * dy, 25);
      const f = 1200 / d2;
      a.vx += dx * f / Math.sqrt(d2);
      a.vy += dy * f / Math.sqrt(d2);
    }
  }
  for (const l of links) {
    const dx = l.to.x - l.from.x, dy = l.to.y - l.from.y;
    const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
    const f = (d - 120) * 0.01;
    l.from.vx += dx / d * f; l.from.vy += dy / d * f;
    l.to.vx -= dx / d * f; l.to.vy -= dy / d * f;
  }
  for (const n of nodes) {
    n.vx += (canvas.width / 2 - n.x) * 0.0005;
    n.vy += (canvas.height / 2 - n.y) * 0.0005;
    n.vx *= 0.85; n.vy *= 0.85;
    n.x += n.vx; n.y += n.vy;
  }
}
function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = '#999';
  for (const l of links) {
    ctx.beginPath();
    ctx.moveTo(l.from.x, l.from.y);
    ctx.lineTo(l.to.x, l.to.y);
    ctx.stroke();
  }
  for (const n of nodes) {
    ctx.beginPath();
    ctx.arc(n.x, n.y, 8, 0, Math.PI * 2);
    ctx.fillStyle = n.fill;
    ctx.fill();
    ctx.strokeStyle = '#333';
    ctx.stroke();
    ctx.fillStyle = '#111';
    ctx.fillText(n.id, n.x + 10, n.y + 3);
  }
}
function tick() { step(); draw(); requestAnimationFrame(tick); }
tick();
)JS"
        << "</script>\n</body>\n</html>\n";
    return out.str();
}

}  // namespace

std::string_view node_role_name(NodeRole role) {
    return role == NodeRole::party ? "party" : "data_type";
}

const GraphNode* DataFlowGraph::find_node(const std::string& id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const GraphNode& node, const std::string& key) {
                                   return node.id < key;
                               });
    if (it == nodes.end() || it->id != id) return nullptr;
    return &*it;
}

DataFlowGraph build_graph(const std::vector<ParsedFlow>& flows,
                          const std::string& policy_id) {
    std::map<std::string, PartyAttribute> parties;
    for (const auto& flow : flows) {
        parties.emplace(flow.sender.value_or("unknown"), flow.sender_party);
        parties.emplace(flow.receiver.value_or("unknown"), flow.receiver_party);
    }

    std::map<std::string, std::string> data_type_ids;
    for (const auto& flow : flows) {
        if (data_type_ids.count(flow.data_type)) continue;
        auto id = flow.data_type;
        if (parties.count(id)) id += " (data type)";
        data_type_ids.emplace(flow.data_type, std::move(id));
    }

    DataFlowGraph graph;
    graph.policy_id = policy_id;
    for (const auto& [id, attribute] : parties)
        graph.nodes.push_back({id, NodeRole::party, attribute});
    for (const auto& [name, id] : data_type_ids)
        graph.nodes.push_back({id, NodeRole::data_type, std::nullopt});
    std::sort(graph.nodes.begin(), graph.nodes.end(),
              [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });

    std::map<std::tuple<std::string, std::string, std::string>, std::set<std::size_t>>
        edges;
    for (const auto& flow : flows) {
        const auto& type_id = data_type_ids.at(flow.data_type);
        auto& into = edges[{flow.sender.value_or("unknown"), type_id, flow.purpose}];
        into.insert(flow.provenance.begin(), flow.provenance.end());
        auto& from = edges[{type_id, flow.receiver.value_or("unknown"), flow.purpose}];
        from.insert(flow.provenance.begin(), flow.provenance.end());
    }
    for (const auto& [key, segments] : edges)
        graph.edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                               {segments.begin(), segments.end()}});
    return graph;
}

std::map<std::string, double> degree_centrality(const DataFlowGraph& graph) {
    Adjacency adj(graph);
    auto M = adj.ids.size();
    std::map<std::string, double> scores;
    for (std::size_t u = 0; u < M; ++u) {
        double raw = static_cast<double>(adj.out[u].size() + adj.in[u].size());
        scores[adj.ids[u]] = M < 2 ? 0.0 : raw / static_cast<double>(M - 1);
    }
    return scores;
}

std::map<std::string, double> closeness_centrality(const DataFlowGraph& graph) {
    Adjacency adj(graph);
    auto M = adj.ids.size();
    std::map<std::string, double> scores;
    constexpr std::size_t kInf = static_cast<std::size_t>(-1);
    for (std::size_t u = 0; u < M; ++u) {
        if (M < 2) {
            scores[adj.ids[u]] = 0.0;
            continue;
        }
        // Distances from every v to u equal a BFS from u over reversed arcs.
        std::vector<std::size_t> dist(M, kInf);
        dist[u] = 0;
        std::deque<std::size_t> queue = {u};
        double reach = 0.0;
        double total = 0.0;
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            for (auto w : adj.in[v]) {
                if (dist[w] != kInf) continue;
                dist[w] = dist[v] + 1;
                reach += 1.0;
                total += static_cast<double>(dist[w]);
                queue.push_back(w);
            }
        }
        scores[adj.ids[u]] =
            total == 0.0 ? 0.0
                         : (reach / total) * (reach / static_cast<double>(M - 1));
    }
    return scores;
}

std::map<std::string, double> betweenness_centrality(const DataFlowGraph& graph) {
    Adjacency adj(graph);
    auto M = adj.ids.size();
    std::vector<double> accumulated(M, 0.0);
    if (M >= 3) {
        constexpr std::size_t kInf = static_cast<std::size_t>(-1);
        for (std::size_t s = 0; s < M; ++s) {
            std::vector<std::size_t> order;
            order.reserve(M);
            std::vector<std::vector<std::size_t>> predecessors(M);
            std::vector<double> sigma(M, 0.0);
            std::vector<std::size_t> dist(M, kInf);
            sigma[s] = 1.0;
            dist[s] = 0;
            std::deque<std::size_t> queue = {s};
            while (!queue.empty()) {
                auto v = queue.front();
                queue.pop_front();
                order.push_back(v);
                for (auto w : adj.out[v]) {
                    if (dist[w] == kInf) {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if (dist[w] == dist[v] + 1) {
                        sigma[w] += sigma[v];
                        predecessors[w].push_back(v);
                    }
                }
            }
            std::vector<double> delta(M, 0.0);
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                auto w = *it;
                for (auto v : predecessors[w])
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                if (w != s) accumulated[w] += delta[w];
            }
        }
        double norm = static_cast<double>(M - 1) * static_cast<double>(M - 2);
        for (auto& value : accumulated) value /= norm;
    }
    std::map<std::string, double> scores;
    for (std::size_t u = 0; u < M; ++u) scores[adj.ids[u]] = accumulated[u];
    return scores;
}

std::vector<std::pair<std::string, double>> top_k(const DataFlowGraph& graph,
                                                  CentralityMetric metric,
                                                  std::size_t k) {
    std::map<std::string, double> scores;
    switch (metric) {
        case CentralityMetric::degree: scores = degree_centrality(graph); break;
        case CentralityMetric::closeness: scores = closeness_centrality(graph); break;
        case CentralityMetric::betweenness: scores = betweenness_centrality(graph); break;
    }
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

std::string export_graph(const DataFlowGraph& graph, ExportFormat format) {
    switch (format) {
        case ExportFormat::json: return graph_to_json(graph).dump(2) + "\n";
        case ExportFormat::dot: return export_dot(graph);
        case ExportFormat::html: return export_html(graph);
    }
    throw UnsupportedFormat("unsupported graph export format");
}

DataFlowGraph graph_from_json(const std::string& text) {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw SchemaViolation("graph json must be an object");
    if (!doc.contains("policy_id") || !doc["policy_id"].is_string() ||
        !doc.contains("nodes") || !doc["nodes"].is_array() || !doc.contains("edges") ||
        !doc["edges"].is_array())
        throw SchemaViolation("graph json must carry policy_id, nodes, and edges");

    DataFlowGraph graph;
    graph.policy_id = doc["policy_id"].get<std::string>();
    std::set<std::string> ids;
    for (const auto& item : doc["nodes"]) {
        if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
            !item.contains("role") || !item["role"].is_string())
            throw SchemaViolation("graph node must carry string id and role");
        GraphNode node;
        node.id = item["id"].get<std::string>();
        auto role = item["role"].get<std::string>();
        if (role == "party")
            node.role = NodeRole::party;
        else if (role == "data_type")
            node.role = NodeRole::data_type;
        else
            throw SchemaViolation("unknown node role: " + role);
        if (item.contains("attribute")) {
            if (!item["attribute"].is_string())
                throw SchemaViolation("node attribute must be a string");
            node.attribute = attribute_from_name(item["attribute"].get<std::string>());
        }
        if (!ids.insert(node.id).second)
            throw SchemaViolation("duplicate node id: " + node.id);
        graph.nodes.push_back(std::move(node));
    }
    for (const auto& item : doc["edges"]) {
        if (!item.is_object() || !item.contains("from") || !item["from"].is_string() ||
            !item.contains("to") || !item["to"].is_string() || !item.contains("purpose") ||
            !item["purpose"].is_string() || !item.contains("segments") ||
            !item["segments"].is_array())
            throw SchemaViolation("graph edge must carry from, to, purpose, segments");
        GraphEdge edge;
        edge.from = item["from"].get<std::string>();
        edge.to = item["to"].get<std::string>();
        edge.purpose = item["purpose"].get<std::string>();
        for (const auto& segment : item["segments"]) {
            if (!segment.is_number_unsigned())
                throw SchemaViolation("edge segments must be non-negative integers");
            edge.segments.push_back(segment.get<std::size_t>());
        }
        if (!ids.count(edge.from) || !ids.count(edge.to))
            throw SchemaViolation("edge references a missing node");
        graph.edges.push_back(std::move(edge));
    }
    return graph;
}

}  // namespace policyflow
