#include "policyflow/config.hpp"

#include <set>
#include <sstream>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int out = 0;
    try {
        out = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs an integer, got '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError("config key '" + key + "' needs an integer, got '" + value + "'");
    return out;
}

InputSpec parse_input_spec(const std::string& value) {
    auto parts = split(value, '|');
    if (parts.size() != 3)
        throw ConfigError("input needs '<policy_id>|<org name>|<html path>', got '" + value + "'");
    InputSpec spec{trim(parts[0]), trim(parts[1]), trim(parts[2])};
    if (spec.policy_id.empty() || spec.org_name.empty() || spec.html_path.empty())
        throw ConfigError("input fields must be non-empty, got '" + value + "'");
    return spec;
}

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "backend") config.backend = value;
    else if (key == "base_url") config.base_url = value;
    else if (key == "api_key_env") config.api_key_env = value;
    else if (key == "fixtures_dir") config.fixtures_dir = value;
    else if (key == "model_screening") config.models.screening = value;
    else if (key == "model_flow") config.models.flow = value;
    else if (key == "model_data_category") config.models.data_category = value;
    else if (key == "model_consumer_type") config.models.consumer_type = value;
    else if (key == "model_purpose") config.models.purpose = value;
    else if (key == "model_method") config.models.method = value;
    else if (key == "temperature") config.temperature = parse_double(key, value);
    else if (key == "top_p") config.top_p = parse_double(key, value);
    else if (key == "kb_dir") config.kb_dir = value;
    else if (key == "prompts_dir") config.prompts_dir = value;
    else if (key == "synonyms") config.synonyms_path = value;
    else if (key == "cache_dir") config.cache_dir = value;
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "threads") config.threads = parse_int(key, value);
    else if (key == "retrieval_threshold") config.retrieval.threshold = parse_double(key, value);
    else if (key == "retrieval_max_contexts")
        config.retrieval.max_contexts = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "weight_user_to_first") config.weights.user_to_first = parse_double(key, value);
    else if (key == "weight_first_to_first")
        config.weights.first_to_first = parse_double(key, value);
    else if (key == "weight_third_to_first")
        config.weights.third_to_first = parse_double(key, value);
    else if (key == "weight_user_to_third") config.weights.user_to_third = parse_double(key, value);
    else if (key == "weight_first_to_third")
        config.weights.first_to_third = parse_double(key, value);
    else if (key == "weight_third_to_third")
        config.weights.third_to_third = parse_double(key, value);
    else if (key == "weight_overall_first")
        config.weights.overall_first = parse_double(key, value);
    else if (key == "weight_overall_third")
        config.weights.overall_third = parse_double(key, value);
    else if (key == "weight_overall_incomplete")
        config.weights.overall_incomplete = parse_double(key, value);
    else if (key == "input") config.inputs.push_back(parse_input_spec(value));
    else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': '" + stripped + "'");
        auto key = trim(stripped.substr(0, eq));
        auto value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
        set_key(config, key, value);
    }
    return config;
}

RunConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

void apply_override(RunConfig& config, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be 'key=value', got '" + assignment + "'");
    auto key = trim(assignment.substr(0, eq));
    auto value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("override must be 'key=value', got '" + assignment + "'");
    set_key(config, key, value);
}

void validate_config(const RunConfig& config) {
    if (config.backend != "mock" && config.backend != "live")
        throw ConfigError("backend must be 'mock' or 'live', got '" + config.backend + "'");
    if (config.backend == "mock" && config.fixtures_dir.empty())
        throw ConfigError("mock backend needs fixtures_dir");
    if (config.backend == "live" && config.api_key_env.empty())
        throw ConfigError("live backend needs api_key_env");
    if (config.threads < 1) throw ConfigError("threads must be at least 1");
    if (config.temperature < 0.0 || config.temperature > 2.0)
        throw ConfigError("temperature must be in [0, 2]");
    if (config.top_p < 0.0 || config.top_p > 1.0) throw ConfigError("top_p must be in [0, 1]");
    if (config.retrieval.threshold < 0.0 || config.retrieval.threshold > 1.0)
        throw ConfigError("retrieval_threshold must be in [0, 1]");
    if (config.retrieval.max_contexts < 1)
        throw ConfigError("retrieval_max_contexts must be at least 1");
    const double weights[] = {
        config.weights.user_to_first,  config.weights.first_to_first,
        config.weights.third_to_first, config.weights.user_to_third,
        config.weights.first_to_third, config.weights.third_to_third,
        config.weights.overall_first,  config.weights.overall_third,
        config.weights.overall_incomplete};
    for (double weight : weights)
        if (weight <= 0.0) throw ConfigError("risk weights must be positive");
    if (config.kb_dir.empty()) throw ConfigError("kb_dir must be non-empty");
    if (config.prompts_dir.empty()) throw ConfigError("prompts_dir must be non-empty");
    std::set<std::string> seen;
    for (const auto& input : config.inputs)
        if (!seen.insert(input.policy_id).second)
            throw ConfigError("duplicate policy id '" + input.policy_id + "'");
}

std::string canonical_config_text(const RunConfig& config) {
    std::string out;
    auto emit = [&out](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    auto num = [](double value) { return format_fixed(value, 4); };
    emit("backend", config.backend);
    emit("base_url", config.base_url);
    emit("api_key_env", config.api_key_env);
    emit("fixtures_dir", config.fixtures_dir);
    emit("model_screening", config.models.screening);
    emit("model_flow", config.models.flow);
    emit("model_data_category", config.models.data_category);
    emit("model_consumer_type", config.models.consumer_type);
    emit("model_purpose", config.models.purpose);
    emit("model_method", config.models.method);
    emit("temperature", num(config.temperature));
    emit("top_p", num(config.top_p));
    emit("kb_dir", config.kb_dir);
    emit("prompts_dir", config.prompts_dir);
    emit("synonyms", config.synonyms_path);
    emit("cache_dir", config.cache_dir);
    emit("output_dir", config.output_dir);
    emit("threads", std::to_string(config.threads));
    emit("retrieval_threshold", num(config.retrieval.threshold));
    emit("retrieval_max_contexts", std::to_string(config.retrieval.max_contexts));
    emit("weight_user_to_first", num(config.weights.user_to_first));
    emit("weight_first_to_first", num(config.weights.first_to_first));
    emit("weight_third_to_first", num(config.weights.third_to_first));
    emit("weight_user_to_third", num(config.weights.user_to_third));
    emit("weight_first_to_third", num(config.weights.first_to_third));
    emit("weight_third_to_third", num(config.weights.third_to_third));
    emit("weight_overall_first", num(config.weights.overall_first));
    emit("weight_overall_third", num(config.weights.overall_third));
    emit("weight_overall_incomplete", num(config.weights.overall_incomplete));
    for (const auto& input : config.inputs)
        emit("input", input.policy_id + "|" + input.org_name + "|" + input.html_path);
    return out;
}

std::string config_hash(const RunConfig& config) {
    return sha256_hex(canonical_config_text(config));
}

}  // namespace policyflow
