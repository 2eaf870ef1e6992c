#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "augsearch/errors.hpp"
#include "augsearch/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitTransport = 4;
constexpr int kExitNumeric = 5;

struct CliOverrides {
    std::string config_path;
    std::map<std::string, std::string> entries;

    // flags parsed separately so that unset ones don't clobber the config
    void set(const std::string& key, const std::string& value) { entries[key] = value; }
};

augsearch::config::PipelineConfig build_config(const CliOverrides& overrides) {
    std::map<std::string, std::string> entries;
    if (!overrides.config_path.empty())
        entries = augsearch::config::load_flat_file(overrides.config_path);
    for (const auto& [key, value] : overrides.entries) entries[key] = value;
    auto cfg = augsearch::config::from_entries(entries);
    cfg.validate();
    return cfg;
}

void add_common_flags(CLI::App* cmd, CliOverrides& overrides) {
    cmd->add_option("--config", overrides.config_path, "config file (flat JSON or key = value)");
    auto opt = [&overrides, cmd](const std::string& flag, const std::string& key,
                                 const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides.set(key, v); }, help);
    };
    opt("--train-pairs", "train_pairs", "training pairs (NDJSON)");
    opt("--train-codebase", "train_codebase", "training codebase (NDJSON)");
    opt("--eval-pairs", "eval_pairs", "held-out pairs (NDJSON)");
    opt("--eval-codebase", "eval_codebase", "held-out codebase (NDJSON)");
    opt("--out-dir", "out_dir", "artifact directory");
    opt("--client", "client", "rewrite client: mock or remote");
    opt("--mock-seed", "mock_seed", "seed for the mock rewrite client");
    opt("--seeds", "seeds", "comma-separated training seeds");
    opt("--theta-q", "theta_q", "query-rewrite keep threshold");
    opt("--theta-c", "theta_c", "code-rewrite keep threshold");
    opt("--n-aug", "n_aug", "augmented instances per original (< 0 keeps all)");
    opt("--n-query", "n_query", "query rewrites requested per pair");
    opt("--n-code", "n_code_per_technique", "code rewrites per technique");
    opt("--alpha", "alpha", "query length expansion bound");
    opt("--bi-lr", "bi_lr", "bi-encoder learning rate");
    opt("--cross-lr", "cross_lr", "cross-encoder learning rate");
    opt("--lr-multiplier", "lr_multiplier", "learning-rate scale for both models");
    opt("--batch-size", "batch_size", "training batch size");
    opt("--tau", "tau", "contrastive temperature");
    opt("--bi-epochs", "bi_epochs", "bi-encoder epochs");
    opt("--cross-epochs", "cross_epochs", "cross-encoder epochs");
    opt("--train-input", "train_input", "training data: auto, original, or augmented");
    opt("--d", "d", "embedding width");
    opt("--hidden", "h", "cross-encoder hidden width");
    opt("--hash-buckets", "hash_buckets", "token hash table size (power of two)");
    opt("--max-tokens", "max_tokens", "token cap per text");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"augment-filter-retrain pipeline for semantic code search"};
    app.require_subcommand(1);

    CliOverrides overrides;
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::string export_path;
    bool project = false;

    auto* stats = app.add_subcommand("stats", "corpus statistics");
    auto* augment = app.add_subcommand("augment", "request and store rewrites");
    auto* train_filter = app.add_subcommand("train-filter", "train the filtering cross-encoder");
    auto* filt = app.add_subcommand("filter", "score rewrites and build the augmented set");
    auto* train = app.add_subcommand("train", "train retrieval bi-encoders");
    auto* eval_cmd = app.add_subcommand("eval", "evaluate trained bi-encoders");
    auto* sweep = app.add_subcommand("sweep", "re-run filter/train/eval over one knob");
    auto* pipe = app.add_subcommand("pipeline", "run every stage end to end");

    for (auto* cmd : {stats, augment, train_filter, filt, train, eval_cmd, sweep, pipe})
        add_common_flags(cmd, overrides);
    eval_cmd->add_option("--export-embeddings", export_path, "write an embedding CSV here");
    eval_cmd->add_flag("--project", project, "append a 2-D projection to the CSV");
    sweep->add_option("--param", sweep_param,
                      "theta_q, theta_c, n_aug, or lr_multiplier")->required();
    sweep->add_option("--values", sweep_values, "values to sweep")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        auto cfg = build_config(overrides);
        if (stats->parsed()) augsearch::pipeline::run_stats(cfg, std::cout);
        else if (augment->parsed()) augsearch::pipeline::run_augment(cfg, std::cout);
        else if (train_filter->parsed()) augsearch::pipeline::run_train_filter(cfg, std::cout);
        else if (filt->parsed()) augsearch::pipeline::run_filter(cfg, std::cout);
        else if (train->parsed()) augsearch::pipeline::run_train(cfg, std::cout);
        else if (eval_cmd->parsed()) {
            augsearch::pipeline::EvalOptions options;
            options.export_embeddings_path = export_path;
            options.project = project;
            augsearch::pipeline::run_eval(cfg, std::cout, options);
        } else if (sweep->parsed()) {
            augsearch::pipeline::run_sweep(cfg, sweep_param, sweep_values, std::cout);
        } else {
            augsearch::pipeline::run_pipeline(cfg, std::cout);
        }
    } catch (const augsearch::CredentialError& e) {
        std::cerr << "credential error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const augsearch::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const augsearch::DivergenceError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const augsearch::DegenerateVectorError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const augsearch::ParseError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const augsearch::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const augsearch::IoError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
