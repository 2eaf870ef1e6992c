#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace augsearch::corpus {

struct QueryCodePair {
    std::int64_t id = 0;
    std::string query;
    std::string code;
};

struct CodebaseEntry {
    std::int64_t code_id = 0;
    std::string code;
};

struct Dataset {
    std::vector<QueryCodePair> pairs;
    std::vector<CodebaseEntry> codebase;

    // Throws ValidationError on duplicate ids, empty texts, or a pair whose
    // code is neither in the codebase by exact text nor by code_id.
    void validate() const;

    // code_id of the codebase entry matching this pair's code text.
    std::int64_t resolve_code_id(const QueryCodePair& pair) const;
};

enum class AugKind { Query, Code };

struct AugVariant {
    std::string text;
    std::optional<double> score;  // set by the filtering stage

    bool operator==(const AugVariant&) const = default;
};

struct AugmentationMap {
    AugKind kind = AugKind::Query;
    std::map<std::int64_t, std::vector<AugVariant>> entries;

    bool operator==(const AugmentationMap&) const = default;
};

struct DatasetStats {
    std::size_t pair_count = 0;
    double mean_query_words = 0.0;
    std::size_t max_query_words = 0;
    double mean_query_tokens = 0.0;
    std::size_t max_query_tokens = 0;
    double mean_code_tokens = 0.0;
    std::size_t max_code_tokens = 0;
    std::vector<std::int64_t> over_ceiling_ids;
};

enum class RecordKind { Pairs, Codebase };

// Newline-delimited JSON loaders. Malformed lines raise ParseError with the
// 1-based line number; duplicate ids and empty files raise ValidationError.
std::vector<QueryCodePair> load_pairs(const std::string& path);
std::vector<CodebaseEntry> load_codebase(const std::string& path);
Dataset load_dataset(const std::string& pairs_path, const std::string& codebase_path);

void save_pairs(const std::vector<QueryCodePair>& pairs, const std::string& path);
void save_codebase(const std::vector<CodebaseEntry>& codebase, const std::string& path);

// Token counts use the tokenizer configured by `hash_buckets` etc. in the
// neural module; stats here only need the split, not the ids.
DatasetStats dataset_stats(const Dataset& dataset, std::size_t token_ceiling = 4096);

void save_augmentation_map(const AugmentationMap& map, const std::string& path);
AugmentationMap load_augmentation_map(const std::string& path);

// Rejects entries whose origin_id is not a pair id (query maps) or not
// resolvable against the dataset (code maps key on the origin pair's id).
void validate_map_against(const AugmentationMap& map, const Dataset& dataset);

std::size_t word_count(const std::string& text);
std::vector<std::string> split_words(const std::string& text);
std::string trim(const std::string& text);

}  // namespace augsearch::corpus
