#include "augsearch/qra.hpp"

#include <random>

#include "augsearch/corpus.hpp"
#include "augsearch/errors.hpp"

namespace augsearch::baselines {

WordSeq WordSeq::from_query(const std::string& query) {
    WordSeq seq{corpus::split_words(query)};
    if (seq.words.empty()) throw ValidationError("WordSeq: empty query");
    return seq;
}

std::string WordSeq::join() const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

WordSeq qra_rewrite(const WordSeq& seq, QraTransform transform, std::size_t i, std::size_t j) {
    const auto n = seq.words.size();
    if (i >= n) throw ValidationError("qra_rewrite: index out of range");
    WordSeq out = seq;
    switch (transform) {
        case QraTransform::Delete:
            if (n < 2) throw ValidationError("qra_rewrite: Delete on length-1 sequence");
            out.words.erase(out.words.begin() + i);
            break;
        case QraTransform::Copy:
            out.words.insert(out.words.begin() + i + 1, out.words[i]);
            break;
        case QraTransform::Swap:
            if (j >= n) throw ValidationError("qra_rewrite: index out of range");
            if (i == j) throw ValidationError("qra_rewrite: Swap needs distinct indices");
            std::swap(out.words[i], out.words[j]);
            break;
    }
    return out;
}

std::vector<std::string> qra_augment(const std::string& query, std::size_t n,
                                     std::uint64_t seed) {
    auto seq = WordSeq::from_query(query);
    if (seq.words.size() < 2) throw ValidationError("qra_augment: query needs >= 2 words");
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    const std::size_t len = seq.words.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::string variant;
        for (int attempt = 0; attempt < 32; ++attempt) {
            auto kind = static_cast<QraTransform>(rng() % 3);
            std::size_t i = rng() % len;
            std::size_t j = 0;
            if (kind == QraTransform::Swap) {
                j = rng() % (len - 1);
                if (j >= i) ++j;  // distinct
            }
            variant = qra_rewrite(seq, kind, i, j).join();
            if (variant != query) break;
            variant.clear();
        }
        if (!variant.empty()) out.push_back(std::move(variant));
    }
    return out;
}

}  // namespace augsearch::baselines
