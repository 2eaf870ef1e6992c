#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace augsearch::neural {

struct TokenizerConfig {
    std::size_t hash_buckets = 32768;  // >= 256, power of two
    bool lowercase = true;
    std::size_t max_tokens = 256;  // hard cap, tail truncated

    void validate() const;
};

// Id 0 is reserved for the cross-encoder separator; hashed ids land in
// [1, hash_buckets).
constexpr std::uint32_t kSeparatorId = 0;

// camelCase / snake_case split, punctuation as single-char tokens.
std::vector<std::string> split_subtokens(const TokenizerConfig& config, const std::string& text);

// Hash each subtoken to a stable id. Throws ValidationError on empty text.
std::vector<std::uint32_t> tokenize(const TokenizerConfig& config, const std::string& text);

std::uint32_t hash_token(const TokenizerConfig& config, const std::string& token);

}  // namespace augsearch::neural
