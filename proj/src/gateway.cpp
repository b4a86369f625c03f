#include "policyflow/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

bool is_quoted(const std::string& s) {
    return s.size() >= 2 && s.front() == '"' && s.back() == '"';
}

// "None" optionally wrapped in quotes, any casing.
bool is_none_marker(const std::string& trimmed) {
    if (iequals(trimmed, "none")) return true;
    return is_quoted(trimmed) && iequals(trimmed.substr(1, trimmed.size() - 2), "none");
}

// Accepts a scalar string, a list of strings, or null; trims entries and
// drops empty ones so a blank endpoint reads as "missing".
std::vector<std::string> read_string_list(const nlohmann::json& value, const char* field) {
    std::vector<std::string> out;
    auto push = [&](const std::string& raw) {
        auto cleaned = trim(raw);
        if (!cleaned.empty()) out.push_back(cleaned);
    };
    if (value.is_null()) return out;
    if (value.is_string()) {
        push(value.get<std::string>());
        return out;
    }
    if (value.is_array()) {
        for (const auto& item : value) {
            if (!item.is_string())
                throw ParseFailure(std::string("flow output: ") + field + " entries must be strings");
            push(item.get<std::string>());
        }
        return out;
    }
    throw ParseFailure(std::string("flow output: ") + field + " must be a string or list");
}

nlohmann::json sender_field(const std::vector<std::string>& values) {
    if (values.size() == 1) return values.front();
    return values;
}

// Splits "https://host[:port]/prefix" into client target and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw BackendError("base_url missing scheme: " + base_url);
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    return {base_url.substr(0, path_start), base_url.substr(path_start)};
}

HttpPost default_transport() {
    return [](const std::string& url, const std::string& api_key,
              const std::string& body) -> HttpResult {
        auto [origin, path_prefix] = split_base_url(url);
        httplib::Client client(origin);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers headers = {{"Authorization", "Bearer " + api_key}};
        auto res = client.Post(path_prefix, headers, body, "application/json");
        if (!res) return {0, "", httplib::to_string(res.error())};
        return {res->status, res->body, ""};
    };
}

int jitter_ms(int max_jitter) {
    if (max_jitter <= 0) return 0;
    thread_local std::mt19937 rng(std::random_device{}());
    return static_cast<int>(rng() % static_cast<unsigned>(max_jitter));
}

}  // namespace

std::string cache_key(const std::string& backend, const ChatRequest& req) {
    std::string material = backend;
    material += '|';
    material += req.model;
    material += '|';
    material += format_fixed(req.temperature, 4);
    material += '|';
    material += format_fixed(req.top_p, 4);
    material += '|';
    material += req.system_content;
    material += '|';
    material += req.user_content;
    return sha256_hex(material);
}

MockBackend::MockBackend(std::string fixtures_dir) : fixtures_dir_(std::move(fixtures_dir)) {
    auto manifest_path = std::filesystem::path(fixtures_dir_) / "manifest.json";
    if (fixtures_dir_.empty() || !std::filesystem::exists(manifest_path)) return;

    auto parsed = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array())
        throw SchemaViolation("mock manifest must be a JSON array: " + manifest_path.string());
    for (const auto& entry : parsed) {
        if (!entry.is_object() || !entry.contains("contains") || !entry.contains("response"))
            throw SchemaViolation("mock manifest rule needs 'contains' and 'response'");
        Rule rule;
        const auto& contains = entry["contains"];
        if (contains.is_string()) {
            rule.contains.push_back(contains.get<std::string>());
        } else if (contains.is_array()) {
            for (const auto& item : contains)
                rule.contains.push_back(item.get<std::string>());
        } else {
            throw SchemaViolation("mock manifest 'contains' must be a string or list");
        }
        const auto& response = entry["response"];
        rule.response = response.is_string() ? response.get<std::string>() : response.dump();
        rules_.push_back(std::move(rule));
    }
}

std::string MockBackend::complete(const ChatRequest& req) {
    auto digest = cache_key(name(), req);
    if (!fixtures_dir_.empty()) {
        auto fixture = std::filesystem::path(fixtures_dir_) / (digest + ".txt");
        if (std::filesystem::exists(fixture)) return read_file(fixture);
    }
    std::string haystack = req.system_content + "\n" + req.user_content;
    for (const auto& rule : rules_) {
        bool hit = true;
        for (const auto& needle : rule.contains) {
            if (haystack.find(needle) == std::string::npos) {
                hit = false;
                break;
            }
        }
        if (hit) return rule.response;
    }
    auto snippet = req.user_content.substr(0, 120);
    throw MockMiss("no mock fixture for request digest " + digest + " user: " + snippet);
}

LiveBackend::LiveBackend(LiveBackendConfig config, HttpPost transport,
                         std::function<void(int)> sleeper)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : default_transport()),
      sleeper_(sleeper ? std::move(sleeper) : [](int ms) {
          std::this_thread::sleep_for(std::chrono::milliseconds(ms));
      }) {}

std::string LiveBackend::complete(const ChatRequest& req) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw BackendError("environment variable " + config_.api_key_env + " is not set");

    nlohmann::ordered_json body;
    body["model"] = req.model;
    body["messages"] = nlohmann::ordered_json::array();
    body["messages"].push_back({{"role", "system"}, {"content", req.system_content}});
    body["messages"].push_back({{"role", "user"}, {"content", req.user_content}});
    body["temperature"] = req.temperature;
    body["top_p"] = req.top_p;

    auto url = config_.base_url + config_.chat_path;
    std::string last_error;
    for (int attempt = 0; attempt < config_.attempts; ++attempt) {
        if (attempt > 0)
            sleeper_((config_.base_delay_ms << (attempt - 1)) + jitter_ms(config_.max_jitter_ms));

        auto result = transport_(url, key, body.dump());
        if (result.status == 200) {
            auto parsed = nlohmann::json::parse(result.body, nullptr, false);
            if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
                !parsed["choices"][0].contains("message") ||
                !parsed["choices"][0]["message"].contains("content") ||
                !parsed["choices"][0]["message"]["content"].is_string())
                throw BackendError("malformed chat completion response");
            return parsed["choices"][0]["message"]["content"].get<std::string>();
        }
        bool retryable = result.status == 0 || result.status == 408 || result.status == 429 ||
                         result.status >= 500;
        last_error = result.status == 0 ? "transport: " + result.error
                                        : "http " + std::to_string(result.status) + ": " + result.body;
        if (!retryable) throw BackendError(last_error);
    }
    throw BackendError("retries exhausted: " + last_error);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, std::string cache_dir)
    : backend_(std::move(backend)), cache_dir_(std::move(cache_dir)) {
    if (!cache_dir_.empty()) std::filesystem::create_directories(cache_dir_);
}

ChatResponse Gateway::complete(const ChatRequest& req) {
    if (req.system_content.empty() || req.user_content.empty())
        throw SchemaViolation("chat request contents must be non-empty");

    auto backend_name = backend_->name();
    std::filesystem::path entry;
    if (!cache_dir_.empty()) {
        entry = std::filesystem::path(cache_dir_) / (cache_key(backend_name, req) + ".txt");
        if (std::filesystem::exists(entry))
            return {read_file(entry), true, backend_name};
    }
    auto text = backend_->complete(req);
    if (!cache_dir_.empty()) {
        std::lock_guard<std::mutex> lock(write_mutex_);
        write_file_atomic(entry, text);
    }
    return {text, false, backend_name};
}

std::string strip_code_fences(const std::string& text) {
    auto cleaned = trim(text);
    if (cleaned.rfind("```", 0) == 0) {
        auto first_newline = cleaned.find('\n');
        if (first_newline == std::string::npos) return "";
        cleaned = cleaned.substr(first_newline + 1);
        auto closing = cleaned.rfind("```");
        if (closing != std::string::npos) cleaned = cleaned.substr(0, closing);
        cleaned = trim(cleaned);
    }
    return cleaned;
}

std::vector<RawFlowTuple> parse_flow_output(const std::string& text) {
    auto cleaned = strip_code_fences(text);
    if (is_none_marker(cleaned)) return {};

    auto parsed = nlohmann::json::parse(cleaned, nullptr, false);
    if (parsed.is_discarded())
        throw ParseFailure("flow output is neither None nor valid JSON");
    if (!parsed.is_object() || !parsed.contains("Output") || !parsed["Output"].is_array())
        throw ParseFailure("flow output must be an object with an Output array");

    std::vector<RawFlowTuple> tuples;
    for (const auto& entry : parsed["Output"]) {
        if (!entry.is_object())
            throw ParseFailure("flow output entries must be objects");
        RawFlowTuple tuple;
        if (entry.contains("data_sender"))
            tuple.senders = read_string_list(entry["data_sender"], "data_sender");
        if (entry.contains("data_type"))
            tuple.types = read_string_list(entry["data_type"], "data_type");
        if (entry.contains("data_receiver"))
            tuple.receivers = read_string_list(entry["data_receiver"], "data_receiver");
        tuples.push_back(std::move(tuple));
    }
    return tuples;
}

std::string render_flow_output(const std::vector<RawFlowTuple>& tuples) {
    if (tuples.empty()) return "None";
    nlohmann::ordered_json output = nlohmann::ordered_json::array();
    for (const auto& tuple : tuples) {
        nlohmann::ordered_json entry;
        entry["data_sender"] = sender_field(tuple.senders);
        entry["data_type"] = tuple.types;
        entry["data_receiver"] = sender_field(tuple.receivers);
        output.push_back(std::move(entry));
    }
    nlohmann::ordered_json root;
    root["Output"] = std::move(output);
    return root.dump();
}

std::string parse_label_output(const std::string& text, const std::vector<std::string>& allowed) {
    auto canonical = [&](const std::string& label) -> const std::string* {
        for (const auto& candidate : allowed)
            if (iequals(candidate, label)) return &candidate;
        return nullptr;
    };
    auto resolve_none = [&]() -> std::string {
        if (const auto* unspecified = canonical("Unspecified")) return *unspecified;
        throw LabelOutOfVocabulary("label None with no Unspecified fallback");
    };

    auto cleaned = strip_code_fences(text);
    if (is_none_marker(cleaned)) return resolve_none();

    auto parsed = nlohmann::json::parse(cleaned, nullptr, false);
    if (parsed.is_discarded())
        throw ParseFailure("label output is neither None nor valid JSON");

    const nlohmann::json* object = &parsed;
    if (parsed.is_object() && parsed.contains("Output")) {
        const auto& output = parsed["Output"];
        if (!output.is_array() || output.empty() || !output[0].is_object())
            throw ParseFailure("label output: Output must be a non-empty array of objects");
        object = &output[0];
    }
    if (!object->is_object())
        throw ParseFailure("label output must be a JSON object");

    static const char* kLabelKeys[] = {"DataCategory", "ConsumerType", "Purpose", "Method"};
    std::string label;
    bool found = false;
    for (const char* key : kLabelKeys) {
        if (object->contains(key) && (*object)[key].is_string()) {
            label = trim((*object)[key].get<std::string>());
            found = true;
            break;
        }
    }
    if (!found)
        throw ParseFailure("label output has no recognised label field");
    if (iequals(label, "none")) return resolve_none();
    if (const auto* match = canonical(label)) return *match;
    throw LabelOutOfVocabulary("label '" + label + "' not in vocabulary");
}

}  // namespace policyflow
