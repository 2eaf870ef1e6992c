#include <chrono>
#include <cstdlib>
#include <thread>

#include "augsearch/client.hpp"
#include "augsearch/errors.hpp"
#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::augmentor {

namespace {

// "http://host:port/some/path" -> ("http://host:port", "/some/path")
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto slash = url.find('/', host_start);
    if (slash == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, slash), url.substr(slash)};
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

RemoteClient::RemoteClient(std::string base_url, std::string api_key, RetryPolicy retry,
                           double requests_per_second)
    : api_key_(std::move(api_key)),
      retry_(retry),
      requests_per_second_(requests_per_second) {
    auto [base, path] = split_url(base_url);
    base_url_ = base;
    path_ = path;
}

RemoteClient RemoteClient::from_environment() {
    const char* base = std::getenv("CHAT_API_BASE");
    const char* key = std::getenv("CHAT_API_KEY");
    if (!base || !*base) throw CredentialError("CHAT_API_BASE is not set");
    if (!key || !*key) throw CredentialError("CHAT_API_KEY is not set");
    return RemoteClient(base, key);
}

ChatResponse RemoteClient::complete(const ChatRequest& request) {
    request.validate();
    if (api_key_.empty()) throw CredentialError("remote client: no API key configured");

    json body;
    body["model"] = request.model_name;
    body["messages"] = json::array();
    for (const auto& m : request.messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    if (request.temperature) body["temperature"] = *request.temperature;
    if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;
    const std::string payload = body.dump();

    int delay_ms = retry_.initial_delay_ms;
    std::string last_error;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms = std::min(static_cast<int>(delay_ms * retry_.multiplier),
                                retry_.max_delay_ms);
        }
        if (requests_per_second_ > 0.0) {
            double min_gap = 1.0 / requests_per_second_;
            double wait = last_dispatch_s_ + min_gap - now_seconds();
            if (wait > 0)
                std::this_thread::sleep_for(std::chrono::duration<double>(wait));
            last_dispatch_s_ = now_seconds();
        }

        httplib::Client http(base_url_);
        http.set_connection_timeout(10);
        http.set_read_timeout(120);
        httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
        auto res = http.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw CredentialError("authentication rejected (HTTP " +
                                  std::to_string(res->status) + ")");
        if (transient_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("unexpected HTTP " + std::to_string(res->status) + ": " +
                                 res->body);

        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw TransportError(std::string("malformed response body: ") + e.what());
        }
        if (!reply.contains("choices") || reply["choices"].empty())
            throw EmptyResponseError("response has no choices");
        const auto& choice = reply["choices"][0];
        ChatResponse out;
        out.content = choice.value("message", json::object()).value("content", "");
        out.finish_reason = choice.value("finish_reason", "");
        if (reply.contains("usage")) {
            TokenUsage u;
            u.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
            u.completion_tokens = reply["usage"].value("completion_tokens", 0L);
            out.usage = u;
        }
        if (out.content.empty())
            throw EmptyResponseError("provider returned empty content (finish_reason=" +
                                     out.finish_reason + ")");
        return out;
    }
    throw TransportError("exhausted " + std::to_string(retry_.max_attempts) +
                         " attempts; last error: " + last_error);
}

}  // namespace augsearch::augmentor
