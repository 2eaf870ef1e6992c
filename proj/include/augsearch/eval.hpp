#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augsearch/corpus.hpp"
#include "augsearch/neural.hpp"

namespace augsearch::eval {

struct QueryWithTruth {
    std::string query;
    std::int64_t truth_code_id = 0;
};

using RankList = std::vector<std::size_t>;  // 1-based rank of truth per query

// Ranks by descending cosine against every codebase entry; ties broken by
// ascending code_id.
RankList retrieve_ranks(const neural::BiEncoderParams& model,
                        const std::vector<QueryWithTruth>& queries,
                        const std::vector<corpus::CodebaseEntry>& codebase);

double mrr(const RankList& ranks);
double recall_at_k(const RankList& ranks, std::size_t k);

// Both metrics operate on L2-normalized embeddings.
double alignment_loss(const std::vector<std::pair<neural::Vec, neural::Vec>>& pairs,
                      double exponent = 2.0);
double uniformity_loss(const std::vector<neural::Vec>& embeddings, double temperature = 2.0);

struct EvalReport {
    double mrr = 0;
    std::map<std::size_t, double> r_at;  // k in {1, 5, 10}
    double align_loss = 0;
    double uniformity = 0;
    std::vector<std::uint64_t> seeds;

    void save(const std::string& path) const;
};

EvalReport evaluate(const neural::BiEncoderParams& model, const corpus::Dataset& eval_set);

struct ExportOptions {
    bool project = false;     // append a 2-D power-iteration projection
    std::size_t max_pairs = 0;  // 0 = all
};

// CSV: kind,id,pair_distance,e0..e{d-1}[,p0,p1]; floats at 9 significant
// digits.
void export_embeddings(const neural::BiEncoderParams& model, const corpus::Dataset& dataset,
                       const std::string& path, const ExportOptions& options = {});

}  // namespace augsearch::eval
