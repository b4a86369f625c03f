#include "policyflow/flow_parser.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "the", "a",  "an",  "this", "that",  "these", "those", "and", "or",
        "of",  "in", "on",  "for",  "with",  "to",    "my",    "our", "your",
        "their", "its"};
    return words;
}

const std::set<std::string>& possessive_tokens() {
    static const std::set<std::string> words = {"my", "our", "your", "their", "its"};
    return words;
}

std::string strip_punct(const std::string& token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && !std::isalnum(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && !std::isalnum(static_cast<unsigned char>(token[end - 1]))) --end;
    return token.substr(begin, end - begin);
}

// Case-insensitive bidirectional substring with a 3-character guard so short
// roots like "ab" cannot latch onto longer names.
bool org_match(const std::string& candidate, const std::string& org_name) {
    if (candidate.size() < 3 || org_name.size() < 3) return false;
    auto org = collapse_whitespace(to_lower(trim(org_name)));
    if (org.size() < 3) return false;
    return candidate.find(org) != std::string::npos || org.find(candidate) != std::string::npos;
}

}  // namespace

std::string_view party_attribute_name(PartyAttribute attribute) {
    switch (attribute) {
        case PartyAttribute::first_party: return "first_party";
        case PartyAttribute::third_party: return "third_party";
        case PartyAttribute::user_party: return "user_party";
        case PartyAttribute::unknown: break;
    }
    return "unknown";
}

std::string_view flow_case_name(FlowCase flow_case) {
    switch (flow_case) {
        case FlowCase::user_to_first: return "user_to_first";
        case FlowCase::first_to_first: return "first_to_first";
        case FlowCase::third_to_first: return "third_to_first";
        case FlowCase::user_to_third: return "user_to_third";
        case FlowCase::first_to_third: return "first_to_third";
        case FlowCase::third_to_third: return "third_to_third";
        case FlowCase::incomplete: break;
    }
    return "incomplete";
}

std::string SynonymTable::canonicalize(const std::string& normalized) const {
    auto it = alias_to_canonical.find(normalized);
    return it == alias_to_canonical.end() ? normalized : it->second;
}

SynonymTable load_synonyms(const std::string& path) {
    auto parsed = nlohmann::json::parse(read_file(path), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw SchemaViolation("synonym table must be a JSON object: " + path);
    SynonymTable table;
    for (const auto& item : parsed.items()) {
        if (!item.value().is_array())
            throw SchemaViolation("synonym aliases for '" + item.key() + "' must be a list");
        auto canonical = collapse_whitespace(to_lower(trim(item.key())));
        for (const auto& alias : item.value()) {
            if (!alias.is_string())
                throw SchemaViolation("synonym aliases for '" + item.key() + "' must be strings");
            table.alias_to_canonical[collapse_whitespace(to_lower(trim(alias.get<std::string>())))] =
                canonical;
        }
    }
    return table;
}

std::string normalize_entity(const std::string& text, const SynonymTable& synonyms) {
    auto cleaned = collapse_whitespace(to_lower(trim(text)));
    auto last_space = cleaned.rfind(' ');
    if (last_space == std::string::npos) {
        cleaned = singularize_token(cleaned);
    } else {
        cleaned = cleaned.substr(0, last_space + 1) + singularize_token(cleaned.substr(last_space + 1));
    }
    return synonyms.canonicalize(cleaned);
}

PartyAttribute attribute_party(const std::string& entity, const EntityLexicon& lexicon) {
    auto cleaned = collapse_whitespace(to_lower(trim(entity)));
    if (cleaned.empty()) return PartyAttribute::unknown;
    auto tokens = split(cleaned, ' ');

    std::string root;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        auto token = strip_punct(*it);
        if (token.empty() || stopwords().count(token)) continue;
        root = token;
        break;
    }
    if (root.empty()) root = strip_punct(tokens.back());

    std::string possessive;
    if (possessive_tokens().count(strip_punct(tokens.front())))
        possessive = strip_punct(tokens.front());
    for (const auto& raw : tokens) {
        auto token = strip_punct(raw);
        // strip_punct keeps internal apostrophes, so 's survives on the root.
        if (token.size() > 2 && token.rfind("'s") == token.size() - 2) {
            possessive = token.substr(0, token.size() - 2);
            break;
        }
    }

    if (lexicon.user_party_keywords.count(root)) return PartyAttribute::user_party;
    if (lexicon.first_party_keywords.count(root)) return PartyAttribute::first_party;
    if (org_match(root, lexicon.org_name)) return PartyAttribute::first_party;
    if (possessive == "our" || org_match(possessive, lexicon.org_name))
        return PartyAttribute::first_party;
    return PartyAttribute::third_party;
}

PartyAttribute attribute_party(const std::optional<std::string>& entity,
                               const EntityLexicon& lexicon) {
    if (!entity.has_value()) return PartyAttribute::unknown;
    return attribute_party(*entity, lexicon);
}

FlowCase classify_flow_case(PartyAttribute sender, PartyAttribute receiver) {
    if (sender == PartyAttribute::unknown || receiver == PartyAttribute::unknown)
        return FlowCase::incomplete;
    if (receiver == PartyAttribute::first_party) {
        switch (sender) {
            case PartyAttribute::user_party: return FlowCase::user_to_first;
            case PartyAttribute::first_party: return FlowCase::first_to_first;
            default: return FlowCase::third_to_first;
        }
    }
    if (receiver == PartyAttribute::third_party) {
        switch (sender) {
            case PartyAttribute::user_party: return FlowCase::user_to_third;
            case PartyAttribute::first_party: return FlowCase::first_to_third;
            default: return FlowCase::third_to_third;
        }
    }
    // user_party receiver: the flow joins its sender's pairing with the user;
    // user-to-user is outside the table and treated as incomplete.
    switch (sender) {
        case PartyAttribute::first_party: return FlowCase::user_to_first;
        case PartyAttribute::third_party: return FlowCase::user_to_third;
        default: return FlowCase::incomplete;
    }
}

std::vector<ParsedFlow> dedup_flows(std::vector<ParsedFlow> flows) {
    std::vector<ParsedFlow> out;
    std::map<std::string, std::size_t> slot_by_key;
    for (auto& flow : flows) {
        std::string key = flow.sender ? "s" + *flow.sender : "\x1e";
        key += '\x1f';
        key += flow.data_type;
        key += '\x1f';
        key += flow.receiver ? "r" + *flow.receiver : "\x1e";
        key += '\x1f';
        key += flow.data_category;
        key += '\x1f';
        key += flow.purpose;
        key += '\x1f';
        key += flow.method;

        if (flow.provenance.empty()) flow.provenance = {flow.segment_index};
        auto [it, inserted] = slot_by_key.emplace(key, out.size());
        if (inserted) {
            out.push_back(std::move(flow));
            continue;
        }
        auto& kept = out[it->second];
        kept.segment_index = std::min(kept.segment_index, flow.segment_index);
        kept.provenance.insert(kept.provenance.end(), flow.provenance.begin(),
                               flow.provenance.end());
    }
    for (auto& flow : out) {
        std::sort(flow.provenance.begin(), flow.provenance.end());
        flow.provenance.erase(std::unique(flow.provenance.begin(), flow.provenance.end()),
                              flow.provenance.end());
    }
    return out;
}

std::vector<ParsedFlow> parse_records(const std::vector<FlowRecord>& records,
                                      const EntityLexicon& lexicon,
                                      const SynonymTable& synonyms) {
    std::vector<ParsedFlow> flows;
    flows.reserve(records.size());
    for (const auto& record : records) {
        ParsedFlow flow;
        if (record.flow.sender.has_value())
            flow.sender = normalize_entity(*record.flow.sender, synonyms);
        flow.data_type = normalize_entity(record.flow.data_type, synonyms);
        if (record.flow.receiver.has_value())
            flow.receiver = normalize_entity(*record.flow.receiver, synonyms);
        flow.sender_party = attribute_party(flow.sender, lexicon);
        flow.receiver_party = attribute_party(flow.receiver, lexicon);
        flow.flow_case = classify_flow_case(flow.sender_party, flow.receiver_party);
        flow.data_category = record.data_category;
        flow.consumer_type = record.consumer_type;
        flow.purpose = record.purpose;
        flow.method = record.method;
        flow.segment_index = record.flow.segment_index;
        flow.provenance = {record.flow.segment_index};
        flows.push_back(std::move(flow));
    }
    return dedup_flows(std::move(flows));
}

}  // namespace policyflow
