#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augsearch/filter.hpp"
#include "augsearch/neural.hpp"
#include "augsearch/prompting.hpp"

namespace augsearch::config {

struct PipelineConfig {
    std::string train_pairs, train_codebase;
    std::string eval_pairs, eval_codebase;
    std::string out_dir = "out";

    prompting::AugmentationBudget budget;
    neural::TrainConfig bi_train;     // defaults: lr 3e-5, wd 0.001
    neural::TrainConfig cross_train;  // defaults: lr 8e-5, wd 0.01
    filter::FilterConfig filtering;
    double n_aug = -1.0;  // < 0 keeps every filtered augmentation

    std::string client = "mock";  // or "remote"
    std::uint64_t mock_seed = 7;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string train_input = "auto";  // auto | original | augmented

    neural::TokenizerConfig tokenizer;
    std::size_t d = 64;
    std::size_t h = 64;

    void validate() const;
};

// Flat key = value document; JSON and TOML-style files are both accepted.
std::map<std::string, std::string> load_flat_file(const std::string& path);

PipelineConfig from_entries(const std::map<std::string, std::string>& entries);
PipelineConfig load(const std::string& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace augsearch::config
