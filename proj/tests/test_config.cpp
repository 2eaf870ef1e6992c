#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "augsearch/config.hpp"
#include "augsearch/errors.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace augsearch;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (fs::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("defaults line up with the documented knobs") {
    config::PipelineConfig cfg;
    CHECK(cfg.filtering.theta_q == doctest::Approx(0.95));
    CHECK(cfg.filtering.theta_c == doctest::Approx(0.75));
    CHECK(cfg.bi_train.learning_rate == doctest::Approx(3e-5));
    CHECK(cfg.bi_train.weight_decay == doctest::Approx(0.001));
    CHECK(cfg.bi_train.batch_size == 32);
    CHECK(cfg.bi_train.temperature == doctest::Approx(0.05));
    CHECK(cfg.bi_train.epochs == 10);
    CHECK(cfg.budget.n_query == 15);
    CHECK(cfg.budget.n_code_per_technique == 3);
    CHECK(cfg.budget.alpha == doctest::Approx(1.6));
    CHECK(cfg.tokenizer.hash_buckets == 32768);
    CHECK(cfg.tokenizer.max_tokens == 256);
    CHECK(cfg.d == 64);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.client == "mock");

    // cross-encoder defaults differ from the bi-encoder ones
    auto from_empty = config::from_entries({});
    CHECK(from_empty.cross_train.learning_rate == doctest::Approx(8e-5));
    CHECK(from_empty.cross_train.weight_decay == doctest::Approx(0.01));
}

TEST_CASE("key = value files parse with comments and quotes") {
    auto path = write_temp("cfg.toml",
                           "# pipeline settings\n"
                           "train_pairs = \"data/train.jsonl\"\n"
                           "train_codebase = 'data/code.jsonl'\n"
                           "theta_q = 0.9\n"
                           "seeds = 5,6\n"
                           "\n"
                           "[section headers are ignored]\n"
                           "n_aug = 3\n");
    auto cfg = config::load(path);
    CHECK(cfg.train_pairs == "data/train.jsonl");
    CHECK(cfg.train_codebase == "data/code.jsonl");
    CHECK(cfg.filtering.theta_q == doctest::Approx(0.9));
    CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 6});
    CHECK(cfg.n_aug == doctest::Approx(3.0));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("flat JSON files parse too") {
    auto path = write_temp("cfg.json",
                           "{\"train_pairs\": \"p.jsonl\", \"train_codebase\": \"c.jsonl\",\n"
                           " \"theta_c\": 0.5, \"seeds\": [7, 8], \"batch_size\": 8,\n"
                           " \"lr_multiplier\": 2.5}\n");
    auto cfg = config::load(path);
    CHECK(cfg.filtering.theta_c == doctest::Approx(0.5));
    CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8});
    CHECK(cfg.bi_train.batch_size == 8);
    CHECK(cfg.cross_train.batch_size == 8);
    CHECK(cfg.bi_train.lr_multiplier == doctest::Approx(2.5));
    CHECK(cfg.cross_train.lr_multiplier == doctest::Approx(2.5));
}

TEST_CASE("bad inputs are rejected with clear errors") {
    auto bad_line = write_temp("cfg_bad.toml", "just some words\n");
    CHECK_THROWS_AS(config::load(bad_line), ParseError);

    auto bad_key = write_temp("cfg_badkey.toml", "no_such_knob = 1\n");
    CHECK_THROWS_AS(config::load(bad_key), ValidationError);

    auto bad_num = write_temp("cfg_badnum.toml", "theta_q = not_a_number\n");
    CHECK_THROWS_AS(config::load(bad_num), ValidationError);

    CHECK_THROWS_AS(config::load("/nonexistent/conf"), IoError);
    CHECK_THROWS_AS(config::parse_seed_list(""), ValidationError);
    CHECK_THROWS_AS(config::parse_seed_list("1,x"), ValidationError);
    CHECK(config::parse_seed_list(" 4 , 5 ") == std::vector<std::uint64_t>{4, 5});
}

TEST_CASE("validation catches inconsistent configs") {
    config::PipelineConfig cfg;
    cfg.train_pairs = "p";
    cfg.train_codebase = "c";
    CHECK_NOTHROW(cfg.validate());
    cfg.client = "carrier-pigeon";
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.client = "mock";
    cfg.seeds.clear();
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.seeds = {1};
    cfg.train_input = "sometimes";
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.train_input = "auto";
    cfg.filtering.theta_q = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.filtering.theta_q = 0.95;
    cfg.train_pairs.clear();
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
