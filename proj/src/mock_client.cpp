#include <random>
#include <sstream>

#include "augsearch/client.hpp"
#include "augsearch/corpus.hpp"
#include "augsearch/errors.hpp"

namespace augsearch::augmentor {

void ChatRequest::validate() const {
    bool has_user = false;
    for (const auto& m : messages) {
        if (m.content.empty()) throw ValidationError("chat request: empty message content");
        if (m.role == "user") has_user = true;
    }
    if (!has_user) throw ValidationError("chat request: no user message");
}

namespace {

std::uint64_t mix(std::uint64_t seed, const std::string& text) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return h;
}

// Extract the section after `marker` up to the terminating output-context
// line (queries) or end of prompt (code; the code itself is multi-line).
std::string extract_section(const std::string& prompt, const std::string& marker,
                            const std::string& stop) {
    auto pos = prompt.find(marker);
    if (pos == std::string::npos) return {};
    pos += marker.size();
    auto end = stop.empty() ? std::string::npos : prompt.find(stop, pos);
    std::string section =
        end == std::string::npos ? prompt.substr(pos) : prompt.substr(pos, end - pos);
    return corpus::trim(section);
}

int parse_count(const std::string& prompt) {
    // "You must generate (N) ..."
    auto pos = prompt.find("You must generate (");
    if (pos == std::string::npos) return 1;
    pos += std::string("You must generate (").size();
    auto close = prompt.find(')', pos);
    if (close == std::string::npos) return 1;
    return std::stoi(prompt.substr(pos, close - pos));
}

int parse_technique_index(const std::string& prompt) {
    static const char* fragments[] = {
        "Rename the method", "more meaningful variable names", "different library functions",
        "the same semantics", "Simplify the code"};
    for (int i = 0; i < 5; ++i) {
        if (prompt.find(fragments[i]) != std::string::npos) return i;
    }
    return 3;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& MockClient::synonym_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"how", "way"},       {"create", "make"},     {"convert", "turn"},
        {"remove", "delete"}, {"find", "locate"},     {"check", "verify"},
        {"get", "fetch"},     {"read", "load"},       {"write", "save"},
        {"sort", "order"},    {"merge", "combine"},   {"split", "divide"},
        {"count", "tally"},   {"print", "display"},   {"compute", "calculate"},
        {"filter", "select"}, {"parse", "decode"},    {"build", "construct"},
        {"list", "array"},    {"string", "text"},     {"file", "document"},
        {"number", "value"},  {"python", "py"},       {"function", "method"},
        {"update", "refresh"}, {"copy", "duplicate"}, {"compare", "match"},
        {"replace", "swap"},  {"loop", "iterate"},    {"dict", "mapping"},
    };
    return table;
}

std::vector<std::string> MockClient::query_rewrites(const std::string& query, int n) const {
    std::mt19937_64 rng(mix(seed_, "q:" + query));
    auto words = corpus::split_words(query);
    const auto& table = synonym_table();
    std::vector<std::string> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        auto variant = words;
        // word-order rotation keeps the count inside the length bound
        std::size_t rot = rng() % variant.size();
        std::rotate(variant.begin(), variant.begin() + rot, variant.end());
        for (auto& w : variant) {
            if (rng() % 2 == 0) continue;
            for (const auto& [a, b] : table) {
                if (w == a) {
                    w = b;
                    break;
                }
                if (w == b) {
                    w = a;
                    break;
                }
            }
        }
        std::string text;
        for (std::size_t i = 0; i < variant.size(); ++i) {
            if (i) text += ' ';
            text += variant[i];
        }
        out.push_back(std::move(text));
    }
    return out;
}

std::vector<std::string> MockClient::code_rewrites(const std::string& code, int technique_index,
                                                   int n) const {
    std::mt19937_64 rng(mix(seed_, "c" + std::to_string(technique_index) + ":" + code));
    std::vector<std::string> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::string variant = code;
        // identifier suffixing on the first def, when present
        auto def_pos = variant.find("def ");
        if (def_pos != std::string::npos) {
            auto paren = variant.find('(', def_pos);
            if (paren != std::string::npos) {
                std::string suffix = "_v" + std::to_string(technique_index) +
                                     std::to_string(static_cast<int>(rng() % 90 + 10));
                variant.insert(paren, suffix);
            }
        }
        // comment insertion
        variant += "\n# variant " + std::to_string(rng() % 1000);
        out.push_back(std::move(variant));
    }
    return out;
}

ChatResponse MockClient::complete(const ChatRequest& request) {
    request.validate();
    const std::string& prompt = request.messages.back().content;
    int n = parse_count(prompt);

    ChatResponse resp;
    resp.finish_reason = "stop";
    std::string query = extract_section(prompt, "Original Query: ", "\n\nRewritten Queries:");
    if (!query.empty()) {
        auto rewrites = query_rewrites(query, n);
        std::ostringstream body;
        body << "Rewritten Queries:\n";
        for (std::size_t i = 0; i < rewrites.size(); ++i)
            body << (i + 1) << ". " << rewrites[i] << "\n";
        resp.content = body.str();
        return resp;
    }
    std::string code = extract_section(prompt, "Original Code: ", "\n\nRewritten Code:");
    if (!code.empty()) {
        int technique = parse_technique_index(prompt);
        auto rewrites = code_rewrites(code, technique, n);
        std::ostringstream body;
        body << "Rewritten Code:\n";
        for (std::size_t i = 0; i < rewrites.size(); ++i)
            body << "Code " << (i + 1) << "\n```python\n" << rewrites[i] << "\n```\n";
        resp.content = body.str();
        return resp;
    }
    throw EmptyResponseError("mock client: unrecognized prompt template");
}

}  // namespace augsearch::augmentor
