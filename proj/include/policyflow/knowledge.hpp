#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace policyflow {

struct KnowledgeNode {
    std::string name;
    std::string description;
    std::vector<std::string> examples;
};

struct KnowledgeTypology {
    std::string kind;  // data_category | consumer_type | purpose | method
    std::string root;
    std::vector<KnowledgeNode> nodes;

    const KnowledgeNode* find(const std::string& name) const;
    // Case-insensitive lookup returning the canonical node name.
    std::optional<std::string> canonical_label(const std::string& name) const;
    std::vector<std::string> node_names() const;
};

// Parses and validates one typology JSON file.
// Throws SchemaViolation on structural problems, UnknownKind on a bad kind.
KnowledgeTypology load_typology(const std::string& path);

// Enforces the shipped vocabulary for each kind; throws SchemaViolation.
void validate_typology(const KnowledgeTypology& typology);

// Text a node is embedded under: "name. description. ex1, ex2".
std::string render_node(const KnowledgeNode& node);

// Deterministic local embedding: hashed bag of words, L2-normalized.
class LocalEmbedder {
public:
    static constexpr std::size_t kDim = 256;
    // Throws SchemaViolation if text is empty.
    std::vector<double> embed(const std::string& text) const;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct RetrievalPolicy {
    double threshold = 0.6;
    std::size_t max_contexts = 2;

    bool operator==(const RetrievalPolicy&) const = default;
};

struct RetrievedContext {
    const KnowledgeNode* node = nullptr;
    double score = 0.0;
    std::string typology_kind;
};

// Immutable similarity index over one typology; linear scan retrieval.
class KnowledgeIndex {
public:
    explicit KnowledgeIndex(KnowledgeTypology typology);

    // Selection rule: candidates strictly above threshold, sorted by
    // descending score with lexicographic node-name tie-break. Exactly one
    // above: returned alone. Two or more: top max_contexts. None: the single
    // highest-scoring node. Throws EmptyIndex on an empty typology.
    std::vector<RetrievedContext> retrieve(const std::string& query,
                                           const RetrievalPolicy& policy = {}) const;

    const KnowledgeTypology& typology() const { return typology_; }

private:
    KnowledgeTypology typology_;
    std::vector<std::vector<double>> vectors_;
    LocalEmbedder embedder_;
};

}  // namespace policyflow
