#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace policyflow {

struct ChatRequest {
    std::string model;
    std::string system_content;
    std::string user_content;
    double temperature = 0.5;
    double top_p = 0.5;
};

struct ChatResponse {
    std::string text;
    bool cached = false;
    std::string backend;
};

// Digest identifying a request; identical requests map to identical keys.
std::string cache_key(const std::string& backend, const ChatRequest& req);

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    // Returns raw completion text; throws BackendError or MockMiss.
    virtual std::string complete(const ChatRequest& req) = 0;
};

// Replays canned responses: exact digest fixtures (<digest>.txt) first, then
// ordered substring rules from manifest.json, first match wins.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::string fixtures_dir);
    std::string name() const override { return "mock"; }
    std::string complete(const ChatRequest& req) override;

private:
    struct Rule {
        std::vector<std::string> contains;
        std::string response;
    };
    std::string fixtures_dir_;
    std::vector<Rule> rules_;
};

struct HttpResult {
    int status = 0;  // 0 means transport failure
    std::string body;
    std::string error;
};

// POST (url, bearer token, json body) -> result.
using HttpPost = std::function<HttpResult(const std::string& url, const std::string& api_key,
                                          const std::string& body)>;

struct LiveBackendConfig {
    std::string base_url;
    std::string chat_path = "/chat/completions";
    std::string api_key_env = "POLICYFLOW_API_KEY";
    int attempts = 3;
    int base_delay_ms = 250;
    int max_jitter_ms = 100;
};

// OpenAI-style chat-completions client with bounded retries and backoff.
class LiveBackend : public Backend {
public:
    explicit LiveBackend(LiveBackendConfig config, HttpPost transport = nullptr,
                         std::function<void(int)> sleeper = nullptr);
    std::string name() const override { return "live"; }
    std::string complete(const ChatRequest& req) override;

private:
    LiveBackendConfig config_;
    HttpPost transport_;
    std::function<void(int)> sleeper_;
};

// Backend access with a file-per-key response cache.
class Gateway {
public:
    // Empty cache_dir disables caching.
    Gateway(std::shared_ptr<Backend> backend, std::string cache_dir);
    ChatResponse complete(const ChatRequest& req);
    const std::string& cache_dir() const { return cache_dir_; }
    Backend& backend() { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    std::string cache_dir_;
    std::mutex write_mutex_;
};

// One extraction-output tuple before cartesian expansion; empty strings have
// already been dropped, so an empty list stands for the missing endpoint.
struct RawFlowTuple {
    std::vector<std::string> senders;
    std::vector<std::string> types;
    std::vector<std::string> receivers;

    bool operator==(const RawFlowTuple&) const = default;
};

// Strips markdown code fences and surrounding whitespace.
std::string strip_code_fences(const std::string& text);

// "None" -> empty list; otherwise {"Output":[{data_sender, data_type,
// data_receiver}]} with scalar-or-list senders/receivers. Throws ParseFailure.
std::vector<RawFlowTuple> parse_flow_output(const std::string& text);

// Inverse of parse_flow_output for well-formed tuples.
std::string render_flow_output(const std::vector<RawFlowTuple>& tuples);

// Extracts a label field ({"Output":[{...}]} or bare object) and matches it
// case-insensitively against `allowed`, returning canonical casing. "None"
// maps to "Unspecified" when allowed. Throws ParseFailure or
// LabelOutOfVocabulary.
std::string parse_label_output(const std::string& text, const std::vector<std::string>& allowed);

}  // namespace policyflow
