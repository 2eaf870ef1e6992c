#include "synthetic.hpp"

#include <random>
#include <stdexcept>

#include "augsearch/client.hpp"

namespace testsupport::synthetic {

using augsearch::corpus::Dataset;

namespace {

// None of these appear in the mock synonym table or in the code template,
// so rewrites leave them alone and they never collide with code tokens.
const std::vector<std::string> kFillers = {
    "hourly", "batch",  "entries", "daily",  "weekly",
    "primary", "backup", "nested",  "remote", "rows",
};

// Unique all-letter signal word per code; letters keep it a single subtoken.
std::string sig_word(int t) {
    std::string s = "sig";
    s += static_cast<char>('a' + t / 26);
    s += static_cast<char>('a' + t % 26);
    return s;
}

// The signal word is the only token shared between a query and its code, so
// matching reduces to spotting it on both sides of the separator. Constant
// token count across codes keeps mean pooling comparable everywhere.
std::string topic_code(int t) {
    return "def " + sig_word(t) + "_records(data):\n"
           "    total = 0\n"
           "    for item in data:\n"
           "        total = total + item\n"
           "    return total + 7\n";
}

// Constant word count for the same reason.
std::string make_query(const std::string& key, int t, std::mt19937_64& rng) {
    std::string q = key + " " + sig_word(t);
    for (std::size_t i = 0; i < 3; ++i) q += " " + kFillers[rng() % kFillers.size()];
    return q;
}

// Held-out queries are a bare key word: no filler dilution, so retrieval
// quality directly reflects how well the key aligned with its code.
std::string heldout_query(const std::string& key) { return key; }

}  // namespace

SyntheticCorpus make_corpus(const SyntheticSpec& spec) {
    const auto& table = augsearch::augmentor::MockClient::synonym_table();
    if (spec.n_codes < 1 || spec.n_codes > static_cast<int>(table.size()))
        throw std::runtime_error("make_corpus: n_codes out of range");

    SyntheticCorpus corpus;
    std::mt19937_64 rng(spec.seed);

    for (int t = 0; t < spec.n_codes; ++t)
        corpus.train.codebase.push_back({t + 1, topic_code(t)});
    for (int k = 0; k < spec.distractor_codes; ++k) {
        std::string code = "def misc" + std::to_string(k) + "(x):\n"
                           "    return x * " + std::to_string(k + 2) + "\n";
        corpus.train.codebase.push_back({spec.n_codes + k + 1, code});
    }

    std::int64_t pair_id = 1;
    for (int t = 0; t < spec.n_codes; ++t) {
        for (int j = 0; j < spec.pairs_per_code; ++j) {
            corpus.train.pairs.push_back(
                {pair_id++, make_query(table[t].first, t, rng), topic_code(t)});
        }
    }

    corpus.heldout.codebase = corpus.train.codebase;
    for (int i = 0; i < spec.heldout_queries; ++i) {
        int t = i % spec.n_codes;
        const auto& key = spec.heldout_uses_synonyms ? table[t].second : table[t].first;
        corpus.heldout.pairs.push_back({i + 1, heldout_query(key), topic_code(t)});
    }
    corpus.train.validate();
    corpus.heldout.validate();
    return corpus;
}

}  // namespace testsupport::synthetic
