#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace augsearch::augmentor {

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string content;
};

struct ChatRequest {
    std::string model_name = "gpt-3.5-turbo-0301";
    std::vector<ChatMessage> messages;
    std::optional<double> temperature;  // unset -> provider default
    std::optional<int> max_output_tokens;

    void validate() const;  // at least one user message, non-empty content
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    std::optional<TokenUsage> usage;
};

class RewriteClient {
public:
    virtual ~RewriteClient() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Deterministic stand-in for the chat API: recognizes the query and code
// prompt templates and emits template-conformant rewrites derived from the
// seed and the prompt text alone.
class MockClient : public RewriteClient {
public:
    explicit MockClient(std::uint64_t seed) : seed_(seed) {}

    ChatResponse complete(const ChatRequest& request) override;

    // The exact rewrite lists the response embeds, for oracle-style checks.
    std::vector<std::string> query_rewrites(const std::string& query, int n) const;
    std::vector<std::string> code_rewrites(const std::string& code, int technique_index,
                                           int n) const;

    // filler -> paraphrase word table used for query rewrites
    static const std::vector<std::pair<std::string, std::string>>& synonym_table();

private:
    std::uint64_t seed_;
};

struct RetryPolicy {
    int max_attempts = 5;
    int initial_delay_ms = 500;
    double multiplier = 2.0;
    int max_delay_ms = 8000;
};

// JSON-over-HTTPS chat-completion client. Base URL and key come from
// CHAT_API_BASE / CHAT_API_KEY unless given explicitly. Transient failures
// (429, 5xx, connection errors) are retried with bounded exponential backoff.
class RemoteClient : public RewriteClient {
public:
    RemoteClient(std::string base_url, std::string api_key, RetryPolicy retry = {},
                 double requests_per_second = 0.0);
    static RemoteClient from_environment();

    ChatResponse complete(const ChatRequest& request) override;

private:
    std::string base_url_;
    std::string path_;
    std::string api_key_;
    RetryPolicy retry_;
    double requests_per_second_;
    double last_dispatch_s_ = -1e18;
};

}  // namespace augsearch::augmentor
