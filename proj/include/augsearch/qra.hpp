#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace augsearch::baselines {

struct WordSeq {
    std::vector<std::string> words;

    static WordSeq from_query(const std::string& query);
    std::string join() const;
};

enum class QraTransform { Delete, Copy, Swap };

// One word-level edit. Delete needs length >= 2; Swap needs two distinct
// in-range positions (j ignored for the others).
WordSeq qra_rewrite(const WordSeq& seq, QraTransform transform, std::size_t i,
                    std::size_t j = 0);

// n variants by uniform sampling of transform kind and positions; exact
// duplicates of the original are resampled (bounded attempts).
std::vector<std::string> qra_augment(const std::string& query, std::size_t n,
                                     std::uint64_t seed);

}  // namespace augsearch::baselines
