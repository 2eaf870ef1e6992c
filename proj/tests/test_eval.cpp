#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "augsearch/errors.hpp"
#include "augsearch/eval.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace augsearch;
using namespace augsearch::neural;

namespace {

TokenizerConfig small_tokenizer() {
    TokenizerConfig t;
    t.hash_buckets = 1024;
    return t;
}

// Brute-force rank oracle working directly on embeddings: descending cosine,
// ties resolved toward the smaller code_id.
std::size_t rank_oracle(const Vec& q, const std::vector<std::pair<std::int64_t, Vec>>& codes,
                        std::int64_t truth_id) {
    double truth_score = 0;
    for (const auto& [id, v] : codes)
        if (id == truth_id) truth_score = cosine_sim(q, v);
    std::size_t rank = 1;
    for (const auto& [id, v] : codes) {
        if (id == truth_id) continue;
        double s = cosine_sim(q, v);
        if (s > truth_score || (s == truth_score && id < truth_id)) ++rank;
    }
    return rank;
}

}  // namespace

TEST_CASE("ranks agree with a brute-force oracle over random corpora") {
    auto t = small_tokenizer();
    std::mt19937_64 rng(314);
    for (int trial = 0; trial < 10; ++trial) {
        auto model = BiEncoderParams::init(t, 16, rng());
        corpus::Dataset d;
        int n_codes = 8 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n_codes; ++i) {
            std::string code = "def fn" + std::to_string(i) + "(v):\n    return v * " +
                               std::to_string(i + 2) + "\n";
            d.codebase.push_back({i + 1, code});
        }
        std::vector<eval::QueryWithTruth> queries;
        for (int i = 0; i < 6; ++i) {
            std::int64_t truth = 1 + static_cast<std::int64_t>(rng() % n_codes);
            queries.push_back({"query item " + std::to_string(rng() % 50), truth});
        }
        auto ranks = eval::retrieve_ranks(model, queries, d.codebase);

        std::vector<std::pair<std::int64_t, Vec>> code_vecs;
        for (const auto& e : d.codebase)
            code_vecs.emplace_back(e.code_id, encode(model, tokenize(t, e.code)));
        for (std::size_t i = 0; i < queries.size(); ++i) {
            auto qv = encode(model, tokenize(t, queries[i].query));
            CHECK(ranks[i] == rank_oracle(qv, code_vecs, queries[i].truth_code_id));
        }
    }
}

TEST_CASE("mrr and recall against hand-computed values") {
    eval::RankList ranks = {1, 2, 4, 10, 11};
    CHECK(eval::mrr(ranks) ==
          doctest::Approx((1.0 + 0.5 + 0.25 + 0.1 + 1.0 / 11.0) / 5.0).epsilon(1e-12));
    CHECK(eval::recall_at_k(ranks, 1) == doctest::Approx(0.2));
    CHECK(eval::recall_at_k(ranks, 5) == doctest::Approx(0.6));
    CHECK(eval::recall_at_k(ranks, 10) == doctest::Approx(0.8));
    CHECK_THROWS_AS(eval::mrr({}), ValidationError);
    CHECK_THROWS_AS(eval::recall_at_k(ranks, 0), ValidationError);
}

TEST_CASE("perfectly aligned pairs have zero alignment loss") {
    std::vector<std::pair<Vec, Vec>> pairs = {{{1, 0}, {2, 0}}, {{0, 3}, {0, 1}}};
    CHECK(eval::alignment_loss(pairs) == 0.0);  // exactly, after normalization
}

TEST_CASE("closed-form uniformity values") {
    // orthogonal unit vectors: squared distance 2, log(exp(-2 * 2)) = -4
    std::vector<Vec> orthogonal = {{1, 0}, {0, 1}};
    CHECK(eval::uniformity_loss(orthogonal, 2.0) == doctest::Approx(-4.0).epsilon(1e-12));
    // antipodal: squared distance 4, log(exp(-2 * 4)) = -8
    std::vector<Vec> antipodal = {{1, 0}, {-1, 0}};
    CHECK(eval::uniformity_loss(antipodal, 2.0) == doctest::Approx(-8.0).epsilon(1e-12));
    // coincident points: distance 0, log(1) = 0
    std::vector<Vec> same = {{2, 0}, {1, 0}};
    CHECK(eval::uniformity_loss(same, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("alignment and uniformity match brute-force formulas") {
    std::mt19937_64 rng(2718);
    auto rand_vec = [&](std::size_t d) {
        Vec v(d);
        for (auto& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
        return v;
    };
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t d = 3 + rng() % 5;
        std::size_t n = 2 + rng() % 6;
        std::vector<std::pair<Vec, Vec>> pairs;
        std::vector<Vec> pool;
        for (std::size_t i = 0; i < n; ++i) {
            auto a = rand_vec(d), b = rand_vec(d);
            pool.push_back(a);
            pool.push_back(b);
            pairs.emplace_back(a, b);
        }
        auto normalize = [](Vec v) {
            double s = 0;
            for (double x : v) s += x * x;
            s = std::sqrt(s);
            for (auto& x : v) x /= s;
            return v;
        };
        double align = 0;
        for (const auto& [a, b] : pairs) {
            auto na = normalize(a), nb = normalize(b);
            double sq = 0;
            for (std::size_t k = 0; k < d; ++k) sq += (na[k] - nb[k]) * (na[k] - nb[k]);
            align += sq;  // exponent 2
        }
        align /= static_cast<double>(pairs.size());
        CHECK(eval::alignment_loss(pairs) == doctest::Approx(align).epsilon(1e-12));

        double sum = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                auto ni = normalize(pool[i]), nj = normalize(pool[j]);
                double sq = 0;
                for (std::size_t k = 0; k < d; ++k) sq += (ni[k] - nj[k]) * (ni[k] - nj[k]);
                sum += std::exp(-2.0 * sq);
                ++count;
            }
        double unif = std::log(sum / static_cast<double>(count));
        CHECK(eval::uniformity_loss(pool) == doctest::Approx(unif).epsilon(1e-10));
    }
}

TEST_CASE("degenerate inputs raise the numeric error") {
    std::vector<std::pair<Vec, Vec>> pairs = {{{0, 0}, {1, 0}}};
    CHECK_THROWS_AS(eval::alignment_loss(pairs), DegenerateVectorError);
    CHECK_THROWS_AS(eval::uniformity_loss({{1, 0}}), ValidationError);
}

TEST_CASE("full evaluation produces a saved report") {
    auto t = small_tokenizer();
    auto model = BiEncoderParams::init(t, 16, 5);
    corpus::Dataset d;
    for (int i = 0; i < 6; ++i) {
        std::string code = "def fn" + std::to_string(i) + "():\n    return " +
                           std::to_string(i) + "\n";
        d.pairs.push_back({i, "query " + std::to_string(i) + " text", code});
        d.codebase.push_back({i, code});
    }
    auto report = eval::evaluate(model, d);
    CHECK(report.mrr > 0.0);
    CHECK(report.mrr <= 1.0);
    CHECK(report.r_at.at(1) <= report.r_at.at(5));
    CHECK(report.r_at.at(5) <= report.r_at.at(10));

    auto path = (fs::temp_directory_path() / "eval_report_test.json").string();
    report.seeds = {1, 2};
    report.save(path);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str().find("\"mrr\"") != std::string::npos);
    CHECK(buf.str().find("\"uniformity_loss\"") != std::string::npos);
}

TEST_CASE("embedding export is deterministic CSV") {
    auto t = small_tokenizer();
    auto model = BiEncoderParams::init(t, 8, 5);
    corpus::Dataset d;
    for (int i = 0; i < 4; ++i) {
        std::string code = "def e" + std::to_string(i) + "():\n    return " + std::to_string(i) +
                           "\n";
        d.pairs.push_back({i, "export query " + std::to_string(i), code});
        d.codebase.push_back({i, code});
    }
    auto read_all = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    auto p1 = (fs::temp_directory_path() / "emb1.csv").string();
    auto p2 = (fs::temp_directory_path() / "emb2.csv").string();
    eval::ExportOptions options;
    options.project = true;
    eval::export_embeddings(model, d, p1, options);
    eval::export_embeddings(model, d, p2, options);
    auto text = read_all(p1);
    CHECK(text == read_all(p2));
    CHECK(text.rfind("kind,id,pair_distance,e0", 0) == 0);
    CHECK(text.find(",p0,p1") != std::string::npos);
    // 1 header + 2 rows per pair
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}
