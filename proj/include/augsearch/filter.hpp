#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augsearch/corpus.hpp"
#include "augsearch/neural.hpp"

namespace augsearch::filter {

struct FilterConfig {
    double theta_q = 0.95;
    double theta_c = 0.75;
    std::uint64_t seed = 0;

    void validate() const;  // thresholds in [0, 1]
};

struct ScoredVariant {
    std::string text;
    double score = 0;
    bool kept = false;
};

struct OriginReport {
    std::vector<ScoredVariant> codes;
    std::vector<ScoredVariant> queries;
    // for each kept query variant, the code it was paired with
    std::vector<std::string> sampled_codes;
};

struct FilterReport {
    std::map<std::int64_t, OriginReport> origins;
    std::size_t codes_kept = 0, codes_dropped = 0;
    std::size_t queries_kept = 0, queries_dropped = 0;

    void save(const std::string& path) const;
};

// Per-origin uniform pairing draw; the stream advances only on kept query
// variants, so decisions are stable under insertion of unrelated origins.
std::size_t pairing_draw(std::uint64_t seed, std::int64_t origin_id, std::uint64_t ordinal,
                         std::size_t code_list_size);

// The augment-filter step: keep a code variant iff its cross-encoder score
// >= theta_c (paired with the origin query), keep a query variant iff its
// score against the origin code >= theta_q, pairing each kept query with a
// seeded uniform choice from [origin code + kept code variants].
struct FilterOutput {
    corpus::Dataset d_aug;
    FilterReport report;
};

FilterOutput filter_augmented(const corpus::Dataset& dataset,
                              const corpus::AugmentationMap& dict_q,
                              const corpus::AugmentationMap& dict_c,
                              const neural::CrossEncoderParams& model,
                              const FilterConfig& config);

// Uniformly keeps round(n_aug * |D|) augmented instances (capped by
// availability); original pairs are always retained.
corpus::Dataset subsample_augmentations(const corpus::Dataset& d_aug,
                                        const corpus::Dataset& original, double n_aug,
                                        std::uint64_t seed);

}  // namespace augsearch::filter
