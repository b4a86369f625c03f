#pragma once

#include <string>
#include <vector>

#include "policyflow/agents.hpp"
#include "policyflow/analyser.hpp"
#include "policyflow/knowledge.hpp"

namespace policyflow {

// One policy document to analyse, declared in the config file as
// `input = <policy_id>|<org name>|<html path>`.
struct InputSpec {
    std::string policy_id;
    std::string org_name;
    std::string html_path;

    bool operator==(const InputSpec&) const = default;
};

struct RunConfig {
    std::string backend = "mock";
    std::string base_url = "https://api.groq.com/openai/v1";
    std::string api_key_env = "POLICYFLOW_API_KEY";
    std::string fixtures_dir;

    AgentModels models;
    double temperature = 0.5;
    double top_p = 0.5;

    std::string kb_dir = "data/kb";
    std::string prompts_dir = "data/prompts";
    std::string synonyms_path;
    std::string cache_dir;

    RetrievalPolicy retrieval;
    RiskWeights weights;

    std::vector<InputSpec> inputs;
    std::string output_dir = "out";
    int threads = 1;

    bool operator==(const RunConfig&) const = default;
};

// Parses `key = value` lines ('#' comments, blank lines allowed). Unknown
// keys, malformed values, and malformed input specs raise ConfigError.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config(const std::string& path);

// Applies a single `key=value` override, same key set as the config file.
void apply_override(RunConfig& config, const std::string& assignment);

// Raises ConfigError unless the config is runnable: known backend, the
// directories the backend needs, positive threads and weights, unique ids.
void validate_config(const RunConfig& config);

// Every field in a fixed order, one `key = value` per line, inputs last.
// Stable across processes, so its hash identifies the configuration.
std::string canonical_config_text(const RunConfig& config);

std::string config_hash(const RunConfig& config);

}  // namespace policyflow
