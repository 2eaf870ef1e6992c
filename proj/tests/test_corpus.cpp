#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "augsearch/corpus.hpp"
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

TEST_CASE("pairs round trip through NDJSON") {
    std::vector<corpus::QueryCodePair> pairs = {
        {1, "sort a list", "def s(x):\n    return sorted(x)\n"},
        {7, "read a file", "def r(p):\n    return open(p).read()\n"},
    };
    auto path = write_temp("pairs_rt.jsonl", "");
    corpus::save_pairs(pairs, path);
    auto loaded = corpus::load_pairs(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].id == 1);
    CHECK(loaded[1].query == "read a file");
    CHECK(loaded[1].code == pairs[1].code);
}

TEST_CASE("codebase round trip and duplicate rejection") {
    std::vector<corpus::CodebaseEntry> entries = {{10, "def a():\n    pass\n"},
                                                  {11, "def b():\n    pass\n"}};
    auto path = write_temp("codebase_rt.jsonl", "");
    corpus::save_codebase(entries, path);
    auto loaded = corpus::load_codebase(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[1].code_id == 11);

    auto dup = write_temp("codebase_dup.jsonl",
                          "{\"code_id\": 1, \"code\": \"x = 1\"}\n"
                          "{\"code_id\": 1, \"code\": \"y = 2\"}\n");
    CHECK_THROWS_AS(corpus::load_codebase(dup), ValidationError);
}

TEST_CASE("malformed lines carry a line number") {
    auto path = write_temp("pairs_bad.jsonl",
                           "{\"id\": 1, \"query\": \"q\", \"code\": \"c\"}\n"
                           "not json at all\n");
    try {
        corpus::load_pairs(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    auto missing = write_temp("pairs_missing.jsonl", "{\"id\": 3, \"query\": \"q\"}\n");
    try {
        corpus::load_pairs(missing);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(std::string(e.what()).find("code") != std::string::npos);
    }
}

TEST_CASE("empty and invalid inputs are rejected") {
    auto empty = write_temp("pairs_empty.jsonl", "\n\n");
    CHECK_THROWS_AS(corpus::load_pairs(empty), ValidationError);
    CHECK_THROWS_AS(corpus::load_pairs("/nonexistent/nowhere.jsonl"), IoError);

    auto blank_query = write_temp("pairs_blank.jsonl",
                                  "{\"id\": 1, \"query\": \"  \", \"code\": \"c\"}\n");
    CHECK_THROWS_AS(corpus::load_pairs(blank_query), ValidationError);
}

TEST_CASE("dataset validation ties pairs to the codebase") {
    corpus::Dataset d;
    d.pairs = {{1, "find max", "def m(x):\n    return max(x)\n"}};
    d.codebase = {{5, "def m(x):\n    return max(x)\n"}};
    CHECK_NOTHROW(d.validate());
    CHECK(d.resolve_code_id(d.pairs[0]) == 5);

    d.pairs.push_back({2, "other", "def other():\n    pass\n"});
    CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("dataset stats match hand counts") {
    corpus::Dataset d;
    d.pairs = {{1, "sort the list", "def getTriArea(pts):\n    return 1\n"},
               {2, "find item", "x = 1\n"}};
    d.codebase = {{1, d.pairs[0].code}, {2, d.pairs[1].code}};
    auto s = corpus::dataset_stats(d);
    CHECK(s.pair_count == 2);
    // (3 + 2) / 2 words
    CHECK(s.mean_query_words == doctest::Approx(2.5));
    CHECK(s.max_query_words == 3);
    // "def getTriArea(pts):" line splits to def,get,tri,area,(,pts,),:
    // plus return,1 => 10 subtokens; "x = 1" => x,=,1 => 3
    CHECK(s.max_code_tokens == 10);
    CHECK(s.mean_code_tokens == doctest::Approx(6.5));
    CHECK(s.over_ceiling_ids.empty());

    auto tight = corpus::dataset_stats(d, 5);
    REQUIRE(tight.over_ceiling_ids.size() == 1);
    CHECK(tight.over_ceiling_ids[0] == 1);
}

TEST_CASE("augmentation maps round trip with scores") {
    corpus::AugmentationMap map;
    map.kind = corpus::AugKind::Code;
    map.entries[3] = {{"def f():\n    pass\n", 0.5}, {"def g():\n    pass\n", std::nullopt}};
    map.entries[9] = {{"def h():\n    pass\n", std::nullopt}};
    auto path = write_temp("aug_map.jsonl", "");
    corpus::save_augmentation_map(map, path);
    auto loaded = corpus::load_augmentation_map(path);
    CHECK(loaded == map);

    auto mixed = write_temp("aug_mixed.jsonl",
                            "{\"origin_id\": 1, \"kind\": \"query\", \"text\": \"a\"}\n"
                            "{\"origin_id\": 1, \"kind\": \"code\", \"text\": \"b\"}\n");
    CHECK_THROWS_AS(corpus::load_augmentation_map(mixed), ValidationError);
}

TEST_CASE("map validation rejects unknown origins") {
    corpus::Dataset d;
    d.pairs = {{1, "q", "c1"}};
    d.codebase = {{1, "c1"}};
    corpus::AugmentationMap map;
    map.entries[2] = {{"text", std::nullopt}};
    CHECK_THROWS_AS(corpus::validate_map_against(map, d), ValidationError);
    map.entries.clear();
    map.entries[1] = {{"text", std::nullopt}};
    CHECK_NOTHROW(corpus::validate_map_against(map, d));
}

TEST_CASE("word helpers") {
    CHECK(corpus::word_count("  two   words  ") == 2);
    CHECK(corpus::trim("\t x \n") == "x");
    auto words = corpus::split_words("a b\tc");
    REQUIRE(words.size() == 3);
    CHECK(words[2] == "c");
}
