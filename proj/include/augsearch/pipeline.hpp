#pragma once
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "augsearch/client.hpp"
#include "augsearch/config.hpp"
#include "augsearch/eval.hpp"

namespace augsearch::pipeline {

// Artifact layout under cfg.out_dir. Every stage reads its inputs from here
// and errors name the stage that produces a missing artifact.
struct StagePaths {
    std::string augment_dir, train_filter_dir, filter_dir, train_dir, eval_dir, sweep_dir;
    std::string dict_q, dict_c, failures;
    std::string cross_ckpt, cross_trace;
    std::string filtered_pairs, filtered_codebase, filter_report;
    std::string eval_report;

    static StagePaths under(const std::string& out_dir);
    std::string bi_ckpt(std::uint64_t seed) const;
    std::string bi_trace(std::uint64_t seed) const;
};

std::unique_ptr<augmentor::RewriteClient> make_client(const config::PipelineConfig& cfg);

void run_stats(const config::PipelineConfig& cfg, std::ostream& out);
void run_augment(const config::PipelineConfig& cfg, std::ostream& out);
void run_train_filter(const config::PipelineConfig& cfg, std::ostream& out);
void run_filter(const config::PipelineConfig& cfg, std::ostream& out);
void run_train(const config::PipelineConfig& cfg, std::ostream& out);

struct SeedStats {
    double mean = 0;
    double stddev = 0;  // sample std, 0 for a single seed
};

struct EvalSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<eval::EvalReport> per_seed;
    SeedStats mrr, r1, r5, r10, align_loss, uniformity;

    void save(const std::string& path) const;
};

struct EvalOptions {
    std::string export_embeddings_path;  // empty = skip
    bool project = false;
};

EvalSummary run_eval(const config::PipelineConfig& cfg, std::ostream& out,
                     const EvalOptions& options = {});

// Re-filters / re-trains / re-evaluates per value of one knob and appends
// CSV rows: param,value,mrr,r1,mrr_std,r1_std.
void run_sweep(const config::PipelineConfig& cfg, const std::string& param,
               const std::vector<double>& values, std::ostream& out);

void run_pipeline(const config::PipelineConfig& cfg, std::ostream& out);

// In-memory train + eval used by sweep and the end-to-end checks.
EvalSummary train_and_eval(const config::PipelineConfig& cfg, const corpus::Dataset& train_set,
                           const corpus::Dataset& eval_set);

}  // namespace augsearch::pipeline
