#include "augsearch/tokenizer.hpp"

#include <cctype>

#include "augsearch/errors.hpp"

namespace augsearch::neural {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Split an identifier-like run on '_' boundaries and camelCase humps.
void split_identifier(const std::string& run, bool lowercase, std::vector<std::string>& out) {
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < run.size(); ++i) {
        char c = run[i];
        if (c == '_') {
            flush();
            continue;
        }
        bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && !cur.empty() &&
            std::islower(static_cast<unsigned char>(cur.back())) != 0) {
            flush();  // camelCase hump
        }
        bool digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
        bool prev_digit =
            !cur.empty() && std::isdigit(static_cast<unsigned char>(cur.back())) != 0;
        if (!cur.empty() && digit != prev_digit) flush();  // letter/digit boundary
        cur.push_back(lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                : c);
    }
    flush();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

void TokenizerConfig::validate() const {
    if (hash_buckets < 256) throw ValidationError("hash_buckets must be >= 256");
    if ((hash_buckets & (hash_buckets - 1)) != 0)
        throw ValidationError("hash_buckets must be a power of two");
}

std::vector<std::string> split_subtokens(const TokenizerConfig& config, const std::string& text) {
    std::vector<std::string> out;
    std::string run;
    auto flush_run = [&] {
        if (!run.empty()) {
            split_identifier(run, config.lowercase, out);
            run.clear();
        }
    };
    for (char c : text) {
        if (is_word_char(c) || c == '_') {
            run.push_back(c);
        } else {
            flush_run();
            if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(std::string(1, c));
        }
    }
    flush_run();
    return out;
}

std::uint32_t hash_token(const TokenizerConfig& config, const std::string& token) {
    // Bucket 0 stays reserved for the separator.
    return 1u + static_cast<std::uint32_t>(fnv1a(token) % (config.hash_buckets - 1));
}

std::vector<std::uint32_t> tokenize(const TokenizerConfig& config, const std::string& text) {
    config.validate();
    auto subtokens = split_subtokens(config, text);
    if (subtokens.empty()) throw ValidationError("tokenize: empty text");
    if (subtokens.size() > config.max_tokens) subtokens.resize(config.max_tokens);
    std::vector<std::uint32_t> ids;
    ids.reserve(subtokens.size());
    for (const auto& t : subtokens) ids.push_back(hash_token(config, t));
    return ids;
}

}  // namespace augsearch::neural
