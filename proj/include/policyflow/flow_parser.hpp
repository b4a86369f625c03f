#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "policyflow/agents.hpp"

namespace policyflow {

enum class PartyAttribute { first_party, third_party, user_party, unknown };

std::string_view party_attribute_name(PartyAttribute attribute);

enum class FlowCase {
    user_to_first,
    first_to_first,
    third_to_first,
    user_to_third,
    first_to_third,
    third_to_third,
    incomplete
};

std::string_view flow_case_name(FlowCase flow_case);

// Alias -> canonical lookups for abbreviation pairs, loaded from a JSON file
// of the shape {"canonical": ["alias", ...]}; keys and aliases lowercase.
struct SynonymTable {
    std::map<std::string, std::string> alias_to_canonical;

    std::string canonicalize(const std::string& normalized) const;
};

SynonymTable load_synonyms(const std::string& path);

// Lowercase, trim, collapse whitespace, singularize the final token, then
// apply the synonym table to the whole string. Idempotent.
std::string normalize_entity(const std::string& text, const SynonymTable& synonyms = {});

struct EntityLexicon {
    std::set<std::string> first_party_keywords = {"we", "us", "app", "website"};
    std::set<std::string> user_party_keywords = {"you", "user", "customer"};
    std::string org_name;  // matched case-insensitively against the root
};

// Deterministic root/possessive heuristic over a normalized entity: the root
// is the last non-stopword token; a possessive is a leading token from
// {my, our, your, their, its} or any token ending in 's. User keywords win,
// then first-party keywords, an org-name substring match (3+ chars), or a
// first-person-plural / org-matching possessive; everything else is third
// party.
PartyAttribute attribute_party(const std::string& entity, const EntityLexicon& lexicon);
PartyAttribute attribute_party(const std::optional<std::string>& entity,
                               const EntityLexicon& lexicon);

// The case table plus the pinned resolutions: any unknown endpoint and the
// user-to-user pair are incomplete; a user_party receiver joins the family
// of its sender's pairing with the user.
FlowCase classify_flow_case(PartyAttribute sender, PartyAttribute receiver);

struct ParsedFlow {
    std::optional<std::string> sender;    // normalized
    std::string data_type;                // normalized
    std::optional<std::string> receiver;  // normalized
    PartyAttribute sender_party = PartyAttribute::unknown;
    PartyAttribute receiver_party = PartyAttribute::unknown;
    FlowCase flow_case = FlowCase::incomplete;
    std::string data_category;
    std::string consumer_type;  // LLM label, kept as a diagnostic
    std::string purpose;
    std::string method;
    std::size_t segment_index = 0;          // lowest across merged duplicates
    std::vector<std::size_t> provenance;    // sorted segment indices

    bool operator==(const ParsedFlow&) const = default;
};

// Merges records whose (sender, data_type, receiver, data_category, purpose,
// method) agree; keeps the lowest segment_index and unions provenance.
std::vector<ParsedFlow> dedup_flows(std::vector<ParsedFlow> flows);

// Normalize endpoints and data types, attribute parties, classify the case,
// then dedup.
std::vector<ParsedFlow> parse_records(const std::vector<FlowRecord>& records,
                                      const EntityLexicon& lexicon,
                                      const SynonymTable& synonyms = {});

}  // namespace policyflow
