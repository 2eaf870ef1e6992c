#include "augsearch/augmentor.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "augsearch/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::augmentor {

namespace {

// "1. text" / "1) text" / "- text" / "* text" -> "text"; otherwise unchanged.
std::string strip_item_prefix(const std::string& line) {
    std::size_t i = 0;
    std::size_t digits = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        ++i;
        ++digits;
    }
    if (digits > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        ++i;
    } else if (digits == 0 && !line.empty() && (line[0] == '-' || line[0] == '*')) {
        i = 1;
    } else {
        i = 0;
    }
    while (i < line.size() && line[i] == ' ') ++i;
    return line.substr(i);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

bool looks_like_item(const std::string& line) {
    if (line.empty()) return false;
    if (line[0] == '-' || line[0] == '*') return true;
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    return i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')');
}

}  // namespace

std::vector<std::string> parse_query_response(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> items;
    bool saw_marker = false;
    bool saw_list_item = false;
    std::vector<std::string> plain_after_marker;
    while (std::getline(in, line)) {
        std::string trimmed = corpus::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed.rfind("Rewritten Queries", 0) == 0) {
            saw_marker = true;
            auto colon = trimmed.find(':');
            if (colon != std::string::npos) {
                std::string rest = corpus::trim(trimmed.substr(colon + 1));
                if (!rest.empty()) plain_after_marker.push_back(rest);
            }
            continue;
        }
        if (looks_like_item(trimmed)) {
            saw_list_item = true;
            std::string item = corpus::trim(strip_quotes(strip_item_prefix(trimmed)));
            if (!item.empty()) items.push_back(item);
        } else if (saw_marker && !saw_list_item) {
            plain_after_marker.push_back(corpus::trim(strip_quotes(trimmed)));
        }
    }
    if (items.empty() && saw_marker) items = plain_after_marker;
    if (items.empty()) throw ExtractionError("no rewritten queries found in response", text);
    return items;
}

std::vector<std::string> parse_code_response(const std::string& text) {
    std::vector<std::string> codes;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t content_start = open + 3;
        // optional language tag up to end of line
        auto nl = text.find('\n', content_start);
        if (nl == std::string::npos)
            throw ExtractionError("unterminated code fence", text);
        std::string tag = corpus::trim(text.substr(content_start, nl - content_start));
        bool tag_is_lang = !tag.empty();
        for (char c : tag) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-')
                tag_is_lang = false;
        }
        std::size_t body_start = (tag.empty() || tag_is_lang) ? nl + 1 : content_start;
        auto close = text.find("```", body_start);
        if (close == std::string::npos)
            throw ExtractionError("unterminated code fence", text);
        std::string body = text.substr(body_start, close - body_start);
        if (!body.empty() && body.back() == '\n') body.pop_back();
        codes.push_back(body);
        pos = close + 3;
    }
    if (codes.empty()) throw ExtractionError("no fenced code blocks in response", text);
    return codes;
}

namespace {

void append_map_records(const std::string& path, corpus::AugKind kind, std::int64_t origin,
                        const std::vector<corpus::AugVariant>& variants) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append to " + path);
    const char* kind_str = kind == corpus::AugKind::Query ? "query" : "code";
    for (const auto& v : variants) {
        json obj{{"origin_id", origin}, {"kind", kind_str}, {"text", v.text}};
        out << obj.dump() << "\n";
    }
    if (!out) throw IoError("write failure on " + path);
}

void append_failure(const std::string& path, std::int64_t origin, const std::string& kind,
                    const std::string& error) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append to " + path);
    out << json{{"origin_id", origin}, {"kind", kind}, {"error", error}}.dump() << "\n";
}

std::vector<corpus::AugVariant> dedup(const std::vector<std::string>& texts) {
    std::vector<corpus::AugVariant> out;
    std::unordered_set<std::string> seen;
    for (const auto& t : texts) {
        if (t.empty()) continue;
        if (seen.insert(t).second) out.push_back({t, std::nullopt});
    }
    return out;
}

corpus::AugmentationMap load_existing(const std::string& path, corpus::AugKind kind) {
    corpus::AugmentationMap map;
    map.kind = kind;
    if (!path.empty() && std::filesystem::exists(path)) {
        map = corpus::load_augmentation_map(path);
        map.kind = kind;
    }
    return map;
}

}  // namespace

AugmentResult augment_dataset(const corpus::Dataset& dataset, RewriteClient& client,
                              const AugmentOptions& options) {
    options.budget.validate();
    dataset.validate();

    AugmentResult result;
    result.dict_q = load_existing(options.dict_q_path, corpus::AugKind::Query);
    result.dict_c = load_existing(options.dict_c_path, corpus::AugKind::Code);

    for (const auto& pair : dataset.pairs) {
        bool have_q = result.dict_q.entries.count(pair.id) > 0;
        bool have_c = result.dict_c.entries.count(pair.id) > 0;
        bool any_ok = have_q || have_c;
        bool all_failed = true;

        if (!have_q) {
            try {
                ChatRequest req;
                req.messages.push_back(
                    {"user", prompting::build_query_prompt(pair.query, options.budget)});
                ++result.requests_made;
                auto resp = client.complete(req);
                auto texts = parse_query_response(resp.content);
                if (options.enforce_length) {
                    std::erase_if(texts, [&](const std::string& t) {
                        return !prompting::enforce_query_length(pair.query, t,
                                                                options.budget.alpha);
                    });
                }
                if (static_cast<int>(texts.size()) > options.budget.n_query)
                    texts.resize(options.budget.n_query);
                auto variants = dedup(texts);
                result.dict_q.entries[pair.id] = variants;
                append_map_records(options.dict_q_path, corpus::AugKind::Query, pair.id,
                                   variants);
                any_ok = true;
                all_failed = false;
            } catch (const std::exception& e) {
                append_failure(options.failure_manifest_path, pair.id, "query", e.what());
            }
        } else {
            all_failed = false;
        }

        if (!have_c) {
            std::vector<std::string> all_codes;
            bool code_ok = false;
            for (auto technique : prompting::kAllTechniques) {
                try {
                    ChatRequest req;
                    req.messages.push_back(
                        {"user",
                         prompting::build_code_prompt(pair.code, technique, options.budget)});
                    ++result.requests_made;
                    auto resp = client.complete(req);
                    auto texts = parse_code_response(resp.content);
                    if (static_cast<int>(texts.size()) > options.budget.n_code_per_technique)
                        texts.resize(options.budget.n_code_per_technique);
                    all_codes.insert(all_codes.end(), texts.begin(), texts.end());
                    code_ok = true;
                } catch (const std::exception& e) {
                    append_failure(options.failure_manifest_path, pair.id, "code", e.what());
                }
            }
            if (code_ok) {
                auto variants = dedup(all_codes);
                result.dict_c.entries[pair.id] = variants;
                append_map_records(options.dict_c_path, corpus::AugKind::Code, pair.id,
                                   variants);
                any_ok = true;
                all_failed = false;
            }
        } else {
            all_failed = false;
        }

        if (all_failed && !any_ok) ++result.failed_origins;
    }
    return result;
}

}  // namespace augsearch::augmentor
