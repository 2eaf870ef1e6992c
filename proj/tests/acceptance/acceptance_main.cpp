// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any failed. argv[1] must be the path to the CLI binary
// (used by the reproducibility check).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "augsearch/augmentor.hpp"
#include "augsearch/client.hpp"
#include "augsearch/config.hpp"
#include "augsearch/corpus.hpp"
#include "augsearch/errors.hpp"
#include "augsearch/eval.hpp"
#include "augsearch/filter.hpp"
#include "augsearch/natgen.hpp"
#include "augsearch/neural.hpp"
#include "augsearch/pipeline.hpp"
#include "augsearch/prompting.hpp"
#include "augsearch/pycode.hpp"
#include "augsearch/qra.hpp"
#include "pyeval.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace augsearch;
using namespace augsearch::neural;
namespace py = augsearch::baselines::py;
using augsearch::baselines::CodeTransform;
using testsupport::pyeval::Value;

namespace {

struct Failure {
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        if (!ok) messages.push_back(what);
    }
};

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// ---- shared tuning used by the synthetic-corpus experiments ----

TokenizerConfig experiment_tokenizer() {
    TokenizerConfig t;
    t.hash_buckets = 2048;
    t.max_tokens = 64;
    return t;
}

constexpr std::size_t kExpDim = 32;
constexpr std::size_t kExpHidden = 64;

TrainConfig cross_train_config() {
    TrainConfig c;
    c.learning_rate = 8e-5;
    c.lr_multiplier = 500.0;
    c.weight_decay = 0.01;
    c.batch_size = 32;
    c.epochs = 500;
    c.seed = 1;
    return c;
}

TrainConfig bi_train_config(std::size_t epochs, std::uint64_t seed) {
    TrainConfig c;
    c.learning_rate = 3e-5;
    c.lr_multiplier = 1000.0;
    c.weight_decay = 0.001;
    c.batch_size = 32;
    c.temperature = 0.05;
    c.epochs = epochs;
    c.seed = seed;
    return c;
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

struct SharedFixtures {
    testsupport::synthetic::SyntheticCorpus plain;     // held-out queries reuse key words
    testsupport::synthetic::SyntheticCorpus synonyms;  // held-out queries use synonyms
    augmentor::AugmentResult aug;
    CrossEncoderParams cross;
    double build_seconds = 0;
};

SharedFixtures* g_fixtures = nullptr;

const SharedFixtures& fixtures() {
    if (!g_fixtures) {
        double t0 = now_s();
        auto* f = new SharedFixtures{
            .plain = {}, .synonyms = {}, .aug = {},
            .cross = CrossEncoderParams::init(experiment_tokenizer(), kExpDim, kExpHidden, 1)};
        testsupport::synthetic::SyntheticSpec spec;
        spec.heldout_uses_synonyms = false;
        f->plain = testsupport::synthetic::make_corpus(spec);
        spec.heldout_uses_synonyms = true;
        f->synonyms = testsupport::synthetic::make_corpus(spec);

        augmentor::MockClient client(7);
        augmentor::AugmentOptions opt;
        opt.budget.n_query = 6;
        opt.budget.n_code_per_technique = 1;
        f->aug = augmentor::augment_dataset(f->plain.train, client, opt);
        f->cross = train_cross_encoder(f->plain.train, cross_train_config(),
                                       experiment_tokenizer(), kExpDim, kExpHidden);
        f->build_seconds = now_s() - t0;
        g_fixtures = f;
    }
    return *g_fixtures;
}

double mean_heldout_mrr(const corpus::Dataset& train, const corpus::Dataset& heldout,
                        std::size_t epochs, std::vector<double>* per_seed = nullptr) {
    double sum = 0;
    for (auto seed : kSeeds) {
        auto model = train_bi_encoder(train, bi_train_config(epochs, seed),
                                      experiment_tokenizer(), kExpDim);
        double m = eval::evaluate(model, heldout).mrr;
        if (per_seed) per_seed->push_back(m);
        sum += m;
    }
    return sum / static_cast<double>(kSeeds.size());
}

// ---- 1. metric oracles ----

void check_metric_oracles(Failure& f) {
    TokenizerConfig tok;
    tok.hash_buckets = 1024;
    std::mt19937_64 rng(11);
    const std::vector<std::string> words = {"find",  "sort", "merge", "files", "rows",
                                            "count", "keys", "print", "cache", "index"};

    for (int fixture = 0; fixture < 50; ++fixture) {
        std::size_t nq = 1 + rng() % 20;
        std::size_t nc = 2 + rng() % 49;
        auto model = BiEncoderParams::init(tok, 16, rng());

        std::vector<corpus::CodebaseEntry> codebase;
        for (std::size_t j = 0; j < nc; ++j) {
            codebase.push_back({static_cast<std::int64_t>(j + 1),
                                "def fn" + std::to_string(j) + "(x):\n    return x + " +
                                    std::to_string(j) + "\n"});
        }
        std::vector<eval::QueryWithTruth> queries;
        for (std::size_t i = 0; i < nq; ++i) {
            std::string q;
            for (int w = 0; w < 4; ++w) q += (w ? " " : "") + words[rng() % words.size()];
            queries.push_back({q, static_cast<std::int64_t>(1 + rng() % nc)});
        }

        auto ranks = eval::retrieve_ranks(model, queries, codebase);
        double lib_mrr = eval::mrr(ranks);

        // brute force: hand-rolled cosine, descending score, ties by code_id
        double oracle_mrr = 0;
        std::vector<std::size_t> oracle_ranks;
        for (const auto& q : queries) {
            auto qe = encode(model, tokenize(tok, q.query));
            auto cos = [&](const std::string& code) {
                auto ce = encode(model, tokenize(tok, code));
                double dot = 0, nq2 = 0, nc2 = 0;
                for (std::size_t k = 0; k < qe.size(); ++k) {
                    dot += qe[k] * ce[k];
                    nq2 += qe[k] * qe[k];
                    nc2 += ce[k] * ce[k];
                }
                return dot / (std::sqrt(nq2) * std::sqrt(nc2));
            };
            double truth_score = 0;
            for (const auto& e : codebase)
                if (e.code_id == q.truth_code_id) truth_score = cos(e.code);
            std::size_t rank = 1;
            for (const auto& e : codebase) {
                double s = cos(e.code);
                if (s > truth_score || (s == truth_score && e.code_id < q.truth_code_id))
                    ++rank;
            }
            oracle_ranks.push_back(rank);
            oracle_mrr += 1.0 / static_cast<double>(rank);
        }
        oracle_mrr /= static_cast<double>(nq);
        f.expect(std::fabs(lib_mrr - oracle_mrr) <= 1e-12,
                 "mrr mismatch on fixture " + std::to_string(fixture));

        for (std::size_t k : {1ul, 5ul, 10ul}) {
            double lib_r = eval::recall_at_k(ranks, k);
            std::size_t hits = 0;
            for (auto r : oracle_ranks)
                if (r <= k) ++hits;
            double oracle_r = static_cast<double>(hits) / static_cast<double>(nq);
            f.expect(std::fabs(lib_r - oracle_r) <= 1e-12,
                     "recall@" + std::to_string(k) + " mismatch on fixture " +
                         std::to_string(fixture));
        }
    }
}

// ---- 2. gradient fidelity ----

void check_gradients(Failure& f) {
    TokenizerConfig tok;
    tok.hash_buckets = 1024;
    std::vector<TokenizedPair> batch;
    for (int i = 0; i < 4; ++i) {
        batch.push_back({tokenize(tok, "query number " + std::to_string(i) + " words"),
                         tokenize(tok, "def g" + std::to_string(i) + "(x):\n    return x\n")});
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto bi = BiEncoderParams::init(tok, 8, seed);
        auto cross = CrossEncoderParams::init(tok, 8, 8, seed);
        double e1 = gradient_check(LossKind::Contrastive, bi, cross, batch, 1e-5, seed);
        double e2 = gradient_check(LossKind::CrossBce, bi, cross, batch, 1e-5, seed);
        f.expect(e1 < 1e-4, "contrastive gradient error " + fmt_double(e1) + " at seed " +
                                std::to_string(seed));
        f.expect(e2 < 1e-4,
                 "bce gradient error " + fmt_double(e2) + " at seed " + std::to_string(seed));
    }
}

// ---- 3. filtering equals the straight-line transcription ----

void check_filter_transcription(Failure& f) {
    corpus::Dataset d;
    for (int i = 0; i < 20; ++i) {
        std::string code = "def item" + std::to_string(i) + "(x):\n    return x * " +
                           std::to_string(i + 2) + "\n";
        d.pairs.push_back({i + 1, "lookup value " + std::to_string(i) + " fast", code});
        d.codebase.push_back({i + 1, code});
    }
    corpus::AugmentationMap dq, dc;
    dq.kind = corpus::AugKind::Query;
    dc.kind = corpus::AugKind::Code;
    for (const auto& p : d.pairs) {
        for (int v = 0; v < 5; ++v) {
            dq.entries[p.id].push_back({p.query + " alt" + std::to_string(v), std::nullopt});
            dc.entries[p.id].push_back({p.code + "# v" + std::to_string(v) + "\n",
                                        std::nullopt});
        }
    }
    TokenizerConfig tok;
    tok.hash_buckets = 1024;
    auto model = CrossEncoderParams::init(tok, 16, 16, 9);

    for (double theta : {0.2, 0.5, 0.505, 0.8}) {
        filter::FilterConfig cfg;
        cfg.theta_q = theta;
        cfg.theta_c = theta;
        cfg.seed = 77;
        auto got = filter::filter_augmented(d, dq, dc, model, cfg);

        // independent transcription: per origin, codes first (kept ones grow
        // the candidate list and become new pairs), then queries, each kept
        // one paired via the seeded uniform draw
        std::vector<corpus::QueryCodePair> want;
        std::vector<std::string> want_codes;
        std::int64_t next_id = 21;
        std::set<std::string> known;
        for (const auto& e : d.codebase) known.insert(e.code);
        for (const auto& p : d.pairs) {
            std::vector<std::string> code_list = {p.code};
            auto q_ids = tokenize(tok, p.query);
            auto c_ids = tokenize(tok, p.code);
            for (const auto& v : dc.entries.at(p.id)) {
                double s = score_cross(model, q_ids, tokenize(tok, v.text));
                if (s >= cfg.theta_c) {
                    want.push_back({next_id++, p.query, v.text});
                    if (known.insert(v.text).second) want_codes.push_back(v.text);
                    code_list.push_back(v.text);
                }
            }
            std::uint64_t ordinal = 0;
            for (const auto& v : dq.entries.at(p.id)) {
                double s = score_cross(model, tokenize(tok, v.text), c_ids);
                if (s >= cfg.theta_q) {
                    auto idx = filter::pairing_draw(cfg.seed, p.id, ordinal++,
                                                    code_list.size());
                    want.push_back({next_id++, v.text, code_list[idx]});
                }
            }
        }

        bool sizes = got.d_aug.pairs.size() == d.pairs.size() + want.size() &&
                     got.d_aug.codebase.size() == d.codebase.size() + want_codes.size();
        f.expect(sizes, "size mismatch at theta " + fmt_double(theta));
        if (!sizes) continue;
        for (std::size_t i = 0; i < want.size(); ++i) {
            const auto& a = got.d_aug.pairs[d.pairs.size() + i];
            f.expect(a.id == want[i].id && a.query == want[i].query && a.code == want[i].code,
                     "pair " + std::to_string(i) + " differs at theta " + fmt_double(theta));
        }
        for (std::size_t i = 0; i < want_codes.size(); ++i)
            f.expect(got.d_aug.codebase[d.codebase.size() + i].code == want_codes[i],
                     "codebase entry " + std::to_string(i) + " differs");
    }

    // boundary: a variant scoring exactly theta is kept, just above drops it
    filter::FilterConfig open_cfg;
    open_cfg.theta_q = 0.0;
    open_cfg.theta_c = 0.0;
    auto all = filter::filter_augmented(d, dq, dc, model, open_cfg);
    double boundary = all.report.origins.at(1).codes.at(0).score;

    filter::FilterConfig at;
    at.theta_c = boundary;
    at.theta_q = 1.0;
    auto kept = filter::filter_augmented(d, dq, dc, model, at);
    f.expect(kept.report.origins.at(1).codes.at(0).kept, "score == theta was dropped");

    at.theta_c = std::nextafter(boundary, 1.0);
    auto dropped = filter::filter_augmented(d, dq, dc, model, at);
    f.expect(!dropped.report.origins.at(1).codes.at(0).kept,
             "score just below theta was kept");
}

// ---- 4. augment-filter-retrain uplift ----

void check_uplift(Failure& f) {
    const auto& fx = fixtures();
    filter::FilterConfig fc;
    fc.theta_q = 0.0;  // synonym rewrites are the uplift carrier; see README
    fc.theta_c = 0.75;
    fc.seed = 5;
    auto filtered = filter::filter_augmented(fx.synonyms.train, fx.aug.dict_q, fx.aug.dict_c,
                                             fx.cross, fc);

    std::vector<double> base_seeds, aug_seeds;
    double base = mean_heldout_mrr(fx.synonyms.train, fx.synonyms.heldout, 6, &base_seeds);
    double aug = mean_heldout_mrr(filtered.d_aug, fx.synonyms.heldout, 6, &aug_seeds);

    f.expect(aug - base >= 0.02, "mean uplift " + fmt_double(aug - base) + " < 0.02 (base " +
                                     fmt_double(base) + ", augmented " + fmt_double(aug) + ")");
    for (std::size_t i = 0; i < kSeeds.size(); ++i)
        f.expect(aug_seeds[i] >= base_seeds[i] - 0.01,
                 "seed " + std::to_string(kSeeds[i]) + " regressed: " +
                     fmt_double(base_seeds[i]) + " -> " + fmt_double(aug_seeds[i]));
}

// ---- 5. filtering efficacy under corruption ----

void check_filtering_efficacy(Failure& f) {
    const auto& fx = fixtures();
    const auto tok = experiment_tokenizer();

    // corrupt 30% of origins by giving them another origin's code variants
    std::vector<std::int64_t> victims;
    for (const auto& [origin, variants] : fx.aug.dict_c.entries)
        if (origin % 10 < 3) victims.push_back(origin);
    std::sort(victims.begin(), victims.end());
    auto corrupted = fx.aug.dict_c;
    for (std::size_t k = 0; k < victims.size(); ++k) {
        auto from = victims[(k + victims.size() / 2) % victims.size()];
        corrupted.entries[victims[k]] = fx.aug.dict_c.entries.at(from);
    }

    std::size_t corr_total = 0, corr_removed = 0, clean_total = 0, clean_kept = 0;
    for (const auto& [origin, variants] : corrupted.entries) {
        auto q = tokenize(tok, fx.plain.train.pairs[origin - 1].query);
        bool is_corrupted = origin % 10 < 3;
        for (const auto& v : variants) {
            double s = score_cross(fx.cross, q, tokenize(tok, v.text));
            if (is_corrupted) {
                ++corr_total;
                if (s < 0.75) ++corr_removed;
            } else {
                ++clean_total;
                if (s >= 0.75) ++clean_kept;
            }
        }
    }
    double removal = static_cast<double>(corr_removed) / static_cast<double>(corr_total);
    double retention = static_cast<double>(clean_kept) / static_cast<double>(clean_total);
    f.expect(removal >= 0.7, "corrupted removal rate " + fmt_double(removal) + " < 0.7");
    f.expect(retention >= 0.7, "clean retention rate " + fmt_double(retention) + " < 0.7");

    filter::FilterConfig keep_all;
    keep_all.theta_q = 0.0;
    keep_all.theta_c = 0.0;
    keep_all.seed = 5;
    filter::FilterConfig strict;
    strict.theta_q = 0.95;
    strict.theta_c = 0.75;
    strict.seed = 5;
    auto unfiltered = filter::filter_augmented(fx.plain.train, fx.aug.dict_q, corrupted,
                                               fx.cross, keep_all);
    auto filtered = filter::filter_augmented(fx.plain.train, fx.aug.dict_q, corrupted,
                                             fx.cross, strict);
    double m_unf = mean_heldout_mrr(unfiltered.d_aug, fx.plain.heldout, 6);
    double m_fil = mean_heldout_mrr(filtered.d_aug, fx.plain.heldout, 6);
    f.expect(m_fil >= m_unf, "filtered mrr " + fmt_double(m_fil) + " < unfiltered " +
                                 fmt_double(m_unf));
}

// ---- 6. alignment / uniformity ----

void normalize(Vec& v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
}

void check_alignment_uniformity(Failure& f) {
    std::vector<std::pair<Vec, Vec>> identical = {
        {{1, 0, 0}, {1, 0, 0}}, {{0, 0.6, 0.8}, {0, 0.6, 0.8}}};
    f.expect(eval::alignment_loss(identical) == 0.0, "identical pairs gave nonzero alignment");

    // two orthonormal points: squared distance 2, t = 2 -> log exp(-4)
    std::vector<Vec> two = {{1, 0}, {0, 1}};
    double u = eval::uniformity_loss(two, 2.0);
    f.expect(std::fabs(u - (-4.0)) <= 1e-9,
             "uniformity for orthonormal pair was " + fmt_double(u));

    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 2 + rng() % 10, dim = 2 + rng() % 5;
        std::vector<Vec> pts(n, Vec(dim));
        for (auto& p : pts) {
            for (auto& x : p) x = gauss(rng);
            normalize(p);
        }
        std::vector<std::pair<Vec, Vec>> pairs;
        for (std::size_t i = 0; i + 1 < n; i += 2) pairs.push_back({pts[i], pts[i + 1]});

        double brute_align = 0;
        for (const auto& [a, b] : pairs) {
            double d2 = 0;
            for (std::size_t k = 0; k < dim; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
            brute_align += d2;
        }
        brute_align /= static_cast<double>(pairs.size());
        f.expect(std::fabs(eval::alignment_loss(pairs) - brute_align) <= 1e-10,
                 "alignment brute-force mismatch on trial " + std::to_string(trial));

        double acc = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                double d2 = 0;
                for (std::size_t k = 0; k < dim; ++k)
                    d2 += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
                acc += std::exp(-2.0 * d2);
                ++count;
            }
        double brute_unif = std::log(acc / static_cast<double>(count));
        f.expect(std::fabs(eval::uniformity_loss(pts, 2.0) - brute_unif) <= 1e-10,
                 "uniformity brute-force mismatch on trial " + std::to_string(trial));
    }
}

// ---- 7. length-bound enforcement ----

void check_length_enforcement(Failure& f) {
    std::mt19937_64 rng(31);
    auto make_words = [](std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
        return s;
    };
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t n = 1 + rng() % 30;
        std::size_t m = 1 + rng() % 60;
        bool want = m >= n && m <= static_cast<std::size_t>(std::floor(1.6 * n));
        bool got = prompting::enforce_query_length(make_words(n), make_words(m), 1.6);
        if (got != want) {
            f.expect(false, "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                " expected " + (want ? "accept" : "reject"));
            return;
        }
    }
}

// ---- 8. transform semantics ----

const std::vector<std::string>& transform_fixtures() {
    static const std::vector<std::string> fixtures = {
        "def add(a, b):\n    return a + b\n",
        "x = 1\ny = x + 2\n",
        "def f(n):\n"
        "    total = 0\n"
        "    for i in range(0, n, 1):\n"
        "        total = total + i\n"
        "    return total\n",
        "def g(x):\n"
        "    if x > 0:\n"
        "        return x * 2\n"
        "    else:\n"
        "        return 0 - x\n",
        "def h(items):\n"
        "    out = []\n"
        "    n = len(items)\n"
        "    while n > 0:\n"
        "        n = n - 1\n"
        "        out = out + [items[n]]\n"
        "    return out\n",
        "def powers(base, count):\n"
        "    result = 1\n"
        "    for k in range(0, count, 1):\n"
        "        result = result * base\n"
        "    return result\n",
        "def mixed(flagged):\n"
        "    s = 'ab'\n"
        "    t = s + 'cd'\n"
        "    if flagged:\n"
        "        return t\n"
        "    else:\n"
        "        return s\n",
        "def call_chain(v):\n"
        "    return abs(v - 10) ** 2\n",
    };
    return fixtures;
}

struct EvalSpec {
    std::string function;
    std::vector<std::vector<Value>> calls;
};

Value vi(long long x) { return Value{x}; }
Value vb(bool x) { return Value{x}; }
Value vl(testsupport::pyeval::List x) { return Value{std::move(x)}; }

std::map<std::size_t, EvalSpec> eval_specs() {
    std::map<std::size_t, EvalSpec> specs;
    specs[0] = {"add", {{vi(1), vi(2)}, {vi(-3), vi(7)}, {vi(0), vi(0)}}};
    specs[2] = {"f", {{vi(0)}, {vi(1)}, {vi(5)}, {vi(9)}}};
    specs[3] = {"g", {{vi(-3)}, {vi(0)}, {vi(4)}}};
    specs[4] = {"h", {{vl({vi(1), vi(2), vi(3)})}, {vl({vi(9)})}, {vl({})}}};
    specs[5] = {"powers", {{vi(2), vi(0)}, {vi(2), vi(6)}, {vi(-3), vi(3)}}};
    specs[6] = {"mixed", {{vb(true)}, {vb(false)}}};
    specs[7] = {"call_chain", {{vi(-5)}, {vi(10)}, {vi(23)}}};
    return specs;
}

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
    std::size_t i = 0;
    for (const auto& tokn : haystack)
        if (i < needle.size() && needle[i] == tokn) ++i;
    return i == needle.size();
}

void check_transform_semantics(Failure& f) {
    const auto& corpus_fixtures = transform_fixtures();
    auto specs = eval_specs();

    // VariableRename round-trips to the identical tree for every name
    for (std::size_t fi = 0; fi < corpus_fixtures.size(); ++fi) {
        auto tree = py::parse_module(corpus_fixtures[fi]);
        for (const auto& name : py::collect_names(tree)) {
            auto there = baselines::rename_variable(tree, name, "qq_roundtrip");
            auto back = baselines::rename_variable(there, "qq_roundtrip", name);
            f.expect(py::module_equal(back, tree),
                     "rename round trip broke fixture " + std::to_string(fi) + " name " + name);
        }
    }

    // OperandSwap / BlockSwap keep behavior on the evaluation grid
    for (auto transform : {CodeTransform::OperandSwap, CodeTransform::BlockSwap}) {
        for (const auto& [fi, spec] : specs) {
            auto tree = py::parse_module(corpus_fixtures[fi]);
            for (std::uint64_t seed = 0; seed < 6; ++seed) {
                std::string rewritten;
                try {
                    rewritten = baselines::natgen_rewrite(tree, transform, seed);
                } catch (const InapplicableError&) {
                    continue;
                }
                for (const auto& args : spec.calls) {
                    auto before = testsupport::pyeval::run_source(corpus_fixtures[fi],
                                                                  spec.function, args);
                    auto after =
                        testsupport::pyeval::run_source(rewritten, spec.function, args);
                    f.expect(before == after,
                             "behavior changed: fixture " + std::to_string(fi) + " transform " +
                                 std::to_string(static_cast<int>(transform)) + " seed " +
                                 std::to_string(seed) + " (" + before + " vs " + after + ")");
                }
            }
        }
    }

    // DeadCodeInject only ever adds tokens
    for (std::size_t fi = 0; fi < corpus_fixtures.size(); ++fi) {
        auto tree = py::parse_module(corpus_fixtures[fi]);
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            auto rewritten = baselines::natgen_rewrite(tree, CodeTransform::DeadCodeInject,
                                                       seed);
            f.expect(is_subsequence(py::lex_tokens(corpus_fixtures[fi]),
                                    py::lex_tokens(rewritten)),
                     "dead-code injection reordered tokens in fixture " + std::to_string(fi));
        }
    }

    // every QRA variant is exactly one word-edit away
    auto one_edit_away = [](const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
        if (b.size() + 1 == a.size()) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                auto c = a;
                c.erase(c.begin() + static_cast<std::ptrdiff_t>(i));
                if (c == b) return true;
            }
        } else if (b.size() == a.size() + 1) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                auto c = a;
                c.insert(c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c[i]);
                if (c == b) return true;
            }
        } else if (b.size() == a.size()) {
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = i + 1; j < a.size(); ++j) {
                    auto c = a;
                    std::swap(c[i], c[j]);
                    if (c == b) return true;
                }
        }
        return false;
    };
    std::mt19937_64 rng(41);
    const std::vector<std::string> vocab = {"how", "to", "sort", "a", "list", "of",
                                            "files", "by", "size", "fast"};
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t len = 2 + rng() % 7;
        std::string query;
        for (std::size_t i = 0; i < len; ++i)
            query += (i ? " " : "") + vocab[rng() % vocab.size()];
        auto original = baselines::WordSeq::from_query(query).words;
        for (const auto& variant : baselines::qra_augment(query, 20, rng())) {
            f.expect(one_edit_away(original, baselines::WordSeq::from_query(variant).words),
                     "variant \"" + variant + "\" is not one edit from \"" + query + "\"");
        }
    }
}

// ---- 9. parser inversion on mock responses ----

void check_parser_roundtrip(Failure& f) {
    augmentor::MockClient client(13);
    prompting::AugmentationBudget budget;
    budget.n_query = 4;
    budget.n_code_per_technique = 2;

    int responses = 0;
    for (int i = 0; responses < 1000; ++i) {
        std::string query = "find the item number " + std::to_string(i) + " quickly";
        augmentor::ChatRequest qreq;
        qreq.messages = {{"user", prompting::build_query_prompt(query, budget)}};
        auto qresp = client.complete(qreq);
        ++responses;
        auto parsed = augmentor::parse_query_response(qresp.content);
        auto want = client.query_rewrites(query, budget.n_query);
        f.expect(parsed == want, "query rewrites diverged for input " + std::to_string(i));

        // no trailing newline: the template embeds the code trimmed
        std::string code = "def item" + std::to_string(i) + "(x):\n    return x + " +
                           std::to_string(i);
        auto technique = prompting::kAllTechniques[i % 5];
        augmentor::ChatRequest creq;
        creq.messages = {{"user", prompting::build_code_prompt(code, technique, budget)}};
        auto cresp = client.complete(creq);
        ++responses;
        auto parsed_codes = augmentor::parse_code_response(cresp.content);
        auto want_codes = client.code_rewrites(code, i % 5, budget.n_code_per_technique);
        f.expect(parsed_codes == want_codes,
                 "code rewrites diverged for input " + std::to_string(i));
    }
}

// ---- 10. mock pipeline reproducibility ----

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[fs::relative(entry.path(), root).string()] = ss.str();
    }
    return files;
}

void check_reproducibility(Failure& f, const std::string& cli) {
    const auto& fx = fixtures();
    auto dir = fs::temp_directory_path() / "augsearch_accept_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);

    corpus::Dataset small;
    small.pairs.assign(fx.synonyms.train.pairs.begin(), fx.synonyms.train.pairs.begin() + 60);
    small.codebase = fx.synonyms.train.codebase;
    corpus::save_pairs(small.pairs, (dir / "train_pairs.jsonl").string());
    corpus::save_codebase(small.codebase, (dir / "codebase.jsonl").string());
    corpus::save_pairs(fx.synonyms.heldout.pairs, (dir / "eval_pairs.jsonl").string());

    write_text(dir / "pipeline.conf",
               "train_pairs = " + (dir / "train_pairs.jsonl").string() + "\n" +
                   "train_codebase = " + (dir / "codebase.jsonl").string() + "\n" +
                   "eval_pairs = " + (dir / "eval_pairs.jsonl").string() + "\n" +
                   "eval_codebase = " + (dir / "codebase.jsonl").string() + "\n" +
                   "client = mock\n"
                   "mock_seed = 7\n"
                   "n_query = 3\n"
                   "n_code_per_technique = 1\n"
                   "cross_epochs = 5\n"
                   "bi_epochs = 2\n"
                   "seeds = 1,2\n"
                   "hash_buckets = 1024\n"
                   "max_tokens = 64\n"
                   "d = 16\n"
                   "h = 16\n");

    for (const char* out_name : {"outA", "outB"}) {
        std::string cmd = "\"" + cli + "\" pipeline --config \"" +
                          (dir / "pipeline.conf").string() + "\" --out-dir \"" +
                          (dir / out_name).string() + "\" > \"" +
                          (dir / (std::string(out_name) + ".log")).string() + "\" 2>&1";
        int status = std::system(cmd.c_str());
        f.expect(status == 0, std::string("pipeline run into ") + out_name +
                                  " exited with status " + std::to_string(status));
        if (status != 0) return;
    }

    auto a = read_tree(dir / "outA");
    auto b = read_tree(dir / "outB");
    f.expect(!a.empty(), "first pipeline run produced no artifacts");
    f.expect(a.size() == b.size(), "runs produced different artifact sets");
    for (const auto& [rel, bytes] : a) {
        auto it = b.find(rel);
        if (it == b.end()) {
            f.expect(false, "artifact missing from second run: " + rel);
            continue;
        }
        f.expect(it->second == bytes, "artifact differs between runs: " + rel);
    }
}

// ---- 11. hyperparameter stability ----

std::vector<std::pair<double, double>> read_sweep_csv(const fs::path& path, Failure& f) {
    std::vector<std::pair<double, double>> rows;  // value, mrr
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || line != "param,value,mrr,r1,mrr_std,r1_std") {
        f.expect(false, "bad sweep csv header in " + path.string());
        return rows;
    }
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) continue;
        rows.push_back({std::stod(cells[1]), std::stod(cells[2])});
    }
    return rows;
}

void check_stability(Failure& f) {
    const auto& fx = fixtures();
    auto dir = fs::temp_directory_path() / "augsearch_accept_sweep";
    fs::remove_all(dir);
    fs::create_directories(dir);

    corpus::save_pairs(fx.plain.train.pairs, (dir / "train_pairs.jsonl").string());
    corpus::save_codebase(fx.plain.train.codebase, (dir / "codebase.jsonl").string());
    corpus::save_pairs(fx.plain.heldout.pairs, (dir / "eval_plain.jsonl").string());
    corpus::save_pairs(fx.synonyms.heldout.pairs, (dir / "eval_syn.jsonl").string());

    config::PipelineConfig cfg;
    cfg.train_pairs = (dir / "train_pairs.jsonl").string();
    cfg.train_codebase = (dir / "codebase.jsonl").string();
    cfg.eval_pairs = (dir / "eval_plain.jsonl").string();
    cfg.eval_codebase = (dir / "codebase.jsonl").string();
    cfg.out_dir = (dir / "out").string();
    cfg.client = "mock";
    cfg.mock_seed = 7;
    cfg.budget.n_query = 6;
    cfg.budget.n_code_per_technique = 1;
    cfg.tokenizer = experiment_tokenizer();
    cfg.d = kExpDim;
    cfg.h = kExpHidden;
    cfg.cross_train = cross_train_config();
    cfg.bi_train = bi_train_config(50, 1);
    cfg.seeds = kSeeds;
    cfg.filtering.theta_q = 0.95;
    cfg.filtering.theta_c = 0.75;
    cfg.filtering.seed = 5;
    cfg.validate();

    std::ostringstream log;
    pipeline::run_augment(cfg, log);
    pipeline::run_train_filter(cfg, log);

    pipeline::run_sweep(cfg, "theta_q", {0.7, 0.75, 0.8, 0.85, 0.9, 0.95}, log);
    pipeline::run_sweep(cfg, "theta_c", {0.7, 0.75, 0.8, 0.85, 0.9}, log);

    auto sweep_dir = fs::path(cfg.out_dir) / "sweep";
    for (const char* param : {"theta_q", "theta_c"}) {
        auto rows = read_sweep_csv(sweep_dir / (std::string("sweep_") + param + ".csv"), f);
        if (rows.empty()) continue;
        double lo = rows[0].second, hi = rows[0].second;
        for (const auto& [value, m] : rows) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        f.expect(hi - lo < 0.05, std::string(param) + " sweep mrr spread " +
                                     fmt_double(hi - lo) + " >= 0.05");
    }

    // augmentation-count sweep on the synonym held-out set with permissive
    // thresholds: synonym rewrites only help when they survive filtering
    auto naug_cfg = cfg;
    naug_cfg.eval_pairs = (dir / "eval_syn.jsonl").string();
    naug_cfg.bi_train = bi_train_config(6, 1);
    naug_cfg.filtering.theta_q = 0.0;
    naug_cfg.filtering.theta_c = 0.0;
    pipeline::run_sweep(naug_cfg, "n_aug", {0.0, 5.0}, log);

    auto rows = read_sweep_csv(sweep_dir / "sweep_n_aug.csv", f);
    if (rows.size() == 2) {
        f.expect(rows[1].second > rows[0].second,
                 "mrr(n_aug=5) " + fmt_double(rows[1].second) + " <= mrr(n_aug=0) " +
                     fmt_double(rows[0].second));
    } else {
        f.expect(false, "n_aug sweep csv had " + std::to_string(rows.size()) + " rows");
    }
}

struct Criterion {
    std::string name;
    std::function<void(Failure&)> run;
    double time_limit_s = 0;  // 0 = none
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];

    const std::vector<Criterion> criteria = {
        {"1. metric oracles match brute force", check_metric_oracles, 5.0},
        {"2. analytic gradients match finite differences", check_gradients, 10.0},
        {"3. filtering equals the straight-line transcription", check_filter_transcription},
        // shared corpus / augmentation / filter-model fixtures are built inside
        // the first criterion that needs them, so their cost counts here
        {"4. augment-filter-retrain beats the baseline", check_uplift, 120.0},
        {"5. the filter removes corrupted augmentations", check_filtering_efficacy},
        {"6. alignment and uniformity match closed forms", check_alignment_uniformity},
        {"7. query length bounds are enforced inclusively", check_length_enforcement},
        {"8. code and query transforms preserve semantics", check_transform_semantics},
        {"9. parsers invert the mock response templates", check_parser_roundtrip},
        {"10. mock pipeline runs are byte-identical",
         [&cli](Failure& f) { check_reproducibility(f, cli); }},
        {"11. metrics are stable across threshold sweeps", check_stability},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Failure f;
        double t0 = now_s();
        try {
            criterion.run(f);
        } catch (const std::exception& e) {
            f.expect(false, std::string("exception: ") + e.what());
        }
        double elapsed = now_s() - t0;
        if (criterion.time_limit_s > 0 && elapsed > criterion.time_limit_s)
            f.expect(false, "runtime " + fmt_double(elapsed) + "s exceeded limit " +
                                fmt_double(criterion.time_limit_s) + "s");
        if (f.messages.empty()) {
            std::printf("PASS  %s (%.1fs)\n", criterion.name.c_str(), elapsed);
        } else {
            ++failed;
            std::printf("FAIL  %s (%.1fs)\n", criterion.name.c_str(), elapsed);
            for (const auto& m : f.messages)
                std::printf("      - %s\n", m.c_str());
        }
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
