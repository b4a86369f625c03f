#include "policyflow/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

const std::set<std::string>& kind_names() {
    static const std::set<std::string> kinds = {"data_category", "consumer_type", "purpose", "method"};
    return kinds;
}

// Shipped vocabulary per kind; validation requires exactly these names,
// except purpose may additionally carry the optional extra node.
const std::set<std::string>& required_names(const std::string& kind) {
    static const std::set<std::string> data = {
        "Demographics", "Contact", "Finance", "Health", "Location",
        "Personal Identity Identifier", "Online Identifier", "Device Information",
        "Biometric Information", "User Online Activities", "User Profile",
        "Criminal Records/Court Judgements", "Generic Personal Information",
        "Survey data", "Other", "Unspecified"};
    static const std::set<std::string> consumer = {"First Party", "Third Party"};
    static const std::set<std::string> purpose = {
        "Basic Service or Feature", "Additional Service or Feature", "Advertising",
        "Marketing", "Analytics or Research", "Personalisation or Customisation",
        "Operational Integrity and Security", "Legal requirement", "Merger/Acquisition",
        "Unspecified"};
    static const std::set<std::string> method = {"Active", "Passive", "Unspecified"};
    if (kind == "data_category") return data;
    if (kind == "consumer_type") return consumer;
    if (kind == "purpose") return purpose;
    return method;
}

void require_keys(const nlohmann::json& object, const std::set<std::string>& keys,
                  const std::string& where) {
    if (!object.is_object())
        throw SchemaViolation(where + ": expected a JSON object");
    for (const auto& key : keys)
        if (!object.contains(key))
            throw SchemaViolation(where + ": missing key '" + key + "'");
    for (const auto& item : object.items())
        if (keys.find(item.key()) == keys.end())
            throw SchemaViolation(where + ": unexpected key '" + item.key() + "'");
}

}  // namespace

const KnowledgeNode* KnowledgeTypology::find(const std::string& name) const {
    for (const auto& node : nodes)
        if (node.name == name) return &node;
    return nullptr;
}

std::optional<std::string> KnowledgeTypology::canonical_label(const std::string& name) const {
    for (const auto& node : nodes)
        if (iequals(node.name, name)) return node.name;
    return std::nullopt;
}

std::vector<std::string> KnowledgeTypology::node_names() const {
    std::vector<std::string> names;
    names.reserve(nodes.size());
    for (const auto& node : nodes) names.push_back(node.name);
    return names;
}

KnowledgeTypology load_typology(const std::string& path) {
    auto raw = read_file(path);
    nlohmann::json parsed = nlohmann::json::parse(raw, nullptr, false);
    if (parsed.is_discarded())
        throw SchemaViolation("typology " + path + ": malformed JSON");

    require_keys(parsed, {"kind", "root", "nodes"}, "typology " + path);
    KnowledgeTypology typology;
    if (!parsed["kind"].is_string() || !parsed["root"].is_string() || !parsed["nodes"].is_array())
        throw SchemaViolation("typology " + path + ": wrong field type");
    typology.kind = parsed["kind"].get<std::string>();
    typology.root = parsed["root"].get<std::string>();

    for (const auto& entry : parsed["nodes"]) {
        require_keys(entry, {"name", "description", "examples"}, "typology node in " + path);
        if (!entry["name"].is_string() || !entry["description"].is_string() ||
            !entry["examples"].is_array())
            throw SchemaViolation("typology node in " + path + ": wrong field type");
        KnowledgeNode node;
        node.name = entry["name"].get<std::string>();
        node.description = entry["description"].get<std::string>();
        for (const auto& example : entry["examples"]) {
            if (!example.is_string())
                throw SchemaViolation("typology node in " + path + ": example is not a string");
            node.examples.push_back(example.get<std::string>());
        }
        typology.nodes.push_back(std::move(node));
    }
    validate_typology(typology);
    return typology;
}

void validate_typology(const KnowledgeTypology& typology) {
    if (kind_names().find(typology.kind) == kind_names().end())
        throw UnknownKind("typology kind '" + typology.kind + "'");
    if (typology.root.empty())
        throw SchemaViolation("typology root must be non-empty");

    std::set<std::string> seen;
    for (const auto& node : typology.nodes) {
        if (node.name.empty())
            throw SchemaViolation("typology node with empty name");
        if (!seen.insert(node.name).second)
            throw SchemaViolation("duplicate typology node '" + node.name + "'");
        if (node.description.empty() && node.name != "Other" && node.name != "Unspecified")
            throw SchemaViolation("typology node '" + node.name + "' needs a description");
    }

    auto expected = required_names(typology.kind);
    if (typology.kind == "purpose" && seen.count("Social Media Integration"))
        expected.insert("Social Media Integration");
    if (seen != expected) {
        std::string detail;
        for (const auto& name : expected)
            if (!seen.count(name)) detail += " missing '" + name + "'";
        for (const auto& name : seen)
            if (!expected.count(name)) detail += " unexpected '" + name + "'";
        throw SchemaViolation("typology '" + typology.kind + "' vocabulary mismatch:" + detail);
    }
}

std::string render_node(const KnowledgeNode& node) {
    return node.name + ". " + node.description + ". " + join(node.examples, ", ");
}

std::vector<double> LocalEmbedder::embed(const std::string& text) const {
    if (text.empty())
        throw SchemaViolation("embed: text must be non-empty");
    std::vector<double> vec(kDim, 0.0);
    for (const auto& token : word_tokens(text))
        vec[fnv1a64(token) % kDim] += 1.0;
    double norm = std::sqrt(std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0));
    if (norm > 0.0)
        for (auto& value : vec) value /= norm;
    return vec;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw SchemaViolation("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

KnowledgeIndex::KnowledgeIndex(KnowledgeTypology typology) : typology_(std::move(typology)) {
    vectors_.reserve(typology_.nodes.size());
    for (const auto& node : typology_.nodes)
        vectors_.push_back(embedder_.embed(render_node(node)));
}

std::vector<RetrievedContext> KnowledgeIndex::retrieve(const std::string& query,
                                                       const RetrievalPolicy& policy) const {
    if (typology_.nodes.empty())
        throw EmptyIndex("retrieve over typology '" + typology_.kind + "'");
    auto query_vec = embedder_.embed(query);

    std::vector<RetrievedContext> scored;
    scored.reserve(typology_.nodes.size());
    for (std::size_t i = 0; i < typology_.nodes.size(); ++i) {
        RetrievedContext ctx;
        ctx.node = &typology_.nodes[i];
        ctx.score = cosine_similarity(query_vec, vectors_[i]);
        ctx.typology_kind = typology_.kind;
        scored.push_back(std::move(ctx));
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const RetrievedContext& a, const RetrievedContext& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.node->name < b.node->name;
                     });

    std::size_t above = 0;
    for (const auto& ctx : scored)
        if (ctx.score > policy.threshold) ++above;

    std::size_t keep = above >= 2 ? std::min(above, policy.max_contexts) : 1;
    scored.resize(keep);
    return scored;
}

}  // namespace policyflow
