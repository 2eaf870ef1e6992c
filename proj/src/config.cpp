#include "augsearch/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "augsearch/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::config {

void PipelineConfig::validate() const {
    if (train_pairs.empty() || train_codebase.empty())
        throw ValidationError("config: train_pairs and train_codebase are required");
    if (out_dir.empty()) throw ValidationError("config: out_dir must not be empty");
    if (client != "mock" && client != "remote")
        throw ValidationError("config: client must be \"mock\" or \"remote\"");
    if (train_input != "auto" && train_input != "original" && train_input != "augmented")
        throw ValidationError("config: train_input must be auto, original, or augmented");
    if (seeds.empty()) throw ValidationError("config: at least one seed is required");
    if (d < 1 || h < 1) throw ValidationError("config: d and h must be >= 1");
    budget.validate();
    bi_train.validate();
    cross_train.validate();
    filtering.validate();
    tokenizer.validate();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = corpus::trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            seeds.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("bad seed value \"" + item + "\"");
        }
    }
    if (seeds.empty()) throw ValidationError("empty seed list \"" + text + "\"");
    return seeds;
}

namespace {

std::string strip_quotes(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        auto stripped = corpus::trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == '[') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line_no);
        auto key = corpus::trim(stripped.substr(0, eq));
        auto value = strip_quotes(corpus::trim(stripped.substr(eq + 1)));
        if (key.empty()) throw ParseError("empty key", line_no);
        entries[key] = value;
    }
    return entries;
}

std::map<std::string, std::string> flatten_json(const json& doc) {
    std::map<std::string, std::string> entries;
    for (const auto& [key, value] : doc.items()) {
        if (value.is_string())
            entries[key] = value.get<std::string>();
        else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ",";
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            entries[key] = joined;
        } else
            entries[key] = value.dump();
    }
    return entries;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": bad number \"" + value + "\"");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": bad integer \"" + value + "\"");
    }
}

}  // namespace

std::map<std::string, std::string> load_flat_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc = json::parse(text, nullptr, false);
        if (doc.is_discarded()) throw ParseError("invalid JSON in " + path, 1);
        if (!doc.is_object()) throw ParseError("config JSON must be an object", 1);
        return flatten_json(doc);
    }
    return parse_key_values(text);
}

PipelineConfig from_entries(const std::map<std::string, std::string>& entries) {
    PipelineConfig cfg;
    for (const auto& [key, value] : entries) {
        if (key == "train_pairs") cfg.train_pairs = value;
        else if (key == "train_codebase") cfg.train_codebase = value;
        else if (key == "eval_pairs") cfg.eval_pairs = value;
        else if (key == "eval_codebase") cfg.eval_codebase = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "n_query") cfg.budget.n_query = static_cast<int>(to_u64(key, value));
        else if (key == "n_code_per_technique")
            cfg.budget.n_code_per_technique = static_cast<int>(to_u64(key, value));
        else if (key == "alpha") cfg.budget.alpha = to_double(key, value);
        else if (key == "bi_lr") cfg.bi_train.learning_rate = to_double(key, value);
        else if (key == "bi_weight_decay") cfg.bi_train.weight_decay = to_double(key, value);
        else if (key == "bi_epochs") cfg.bi_train.epochs = to_u64(key, value);
        else if (key == "cross_lr") cfg.cross_train.learning_rate = to_double(key, value);
        else if (key == "cross_weight_decay")
            cfg.cross_train.weight_decay = to_double(key, value);
        else if (key == "cross_epochs") cfg.cross_train.epochs = to_u64(key, value);
        else if (key == "lr_multiplier") {
            cfg.bi_train.lr_multiplier = to_double(key, value);
            cfg.cross_train.lr_multiplier = cfg.bi_train.lr_multiplier;
        } else if (key == "batch_size") {
            cfg.bi_train.batch_size = to_u64(key, value);
            cfg.cross_train.batch_size = cfg.bi_train.batch_size;
        } else if (key == "tau") cfg.bi_train.temperature = to_double(key, value);
        else if (key == "theta_q") cfg.filtering.theta_q = to_double(key, value);
        else if (key == "theta_c") cfg.filtering.theta_c = to_double(key, value);
        else if (key == "filter_seed") cfg.filtering.seed = to_u64(key, value);
        else if (key == "n_aug") cfg.n_aug = to_double(key, value);
        else if (key == "client") cfg.client = value;
        else if (key == "mock_seed") cfg.mock_seed = to_u64(key, value);
        else if (key == "seeds") cfg.seeds = parse_seed_list(value);
        else if (key == "train_input") cfg.train_input = value;
        else if (key == "hash_buckets")
            cfg.tokenizer.hash_buckets = static_cast<std::size_t>(to_u64(key, value));
        else if (key == "max_tokens")
            cfg.tokenizer.max_tokens = static_cast<std::size_t>(to_u64(key, value));
        else if (key == "d") cfg.d = static_cast<std::size_t>(to_u64(key, value));
        else if (key == "h") cfg.h = static_cast<std::size_t>(to_u64(key, value));
        else
            throw ValidationError("unknown config key \"" + key + "\"");
    }
    cfg.cross_train.learning_rate =
        entries.count("cross_lr") ? cfg.cross_train.learning_rate : 8e-5;
    cfg.cross_train.weight_decay =
        entries.count("cross_weight_decay") ? cfg.cross_train.weight_decay : 0.01;
    return cfg;
}

PipelineConfig load(const std::string& path) { return from_entries(load_flat_file(path)); }

}  // namespace augsearch::config
