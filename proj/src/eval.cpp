#include "augsearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "augsearch/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::eval {

namespace {

double sq_norm(const neural::Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
}

neural::Vec normalized(const neural::Vec& v, const char* what) {
    double n = std::sqrt(sq_norm(v));
    if (n == 0.0) throw DegenerateVectorError(std::string(what) + ": zero-norm embedding");
    neural::Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double sq_dist(const neural::Vec& a, const neural::Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

RankList retrieve_ranks(const neural::BiEncoderParams& model,
                        const std::vector<QueryWithTruth>& queries,
                        const std::vector<corpus::CodebaseEntry>& codebase) {
    if (codebase.empty()) throw ValidationError("retrieve_ranks: empty codebase");
    std::unordered_map<std::int64_t, std::size_t> id_index;
    std::vector<neural::Vec> code_vecs;
    code_vecs.reserve(codebase.size());
    for (std::size_t i = 0; i < codebase.size(); ++i) {
        id_index.emplace(codebase[i].code_id, i);
        auto v = encode(model, neural::tokenize(model.tokenizer, codebase[i].code));
        if (sq_norm(v) == 0.0)
            throw DegenerateVectorError("zero embedding for code_id " +
                                        std::to_string(codebase[i].code_id));
        code_vecs.push_back(std::move(v));
    }

    RankList ranks;
    ranks.reserve(queries.size());
    for (const auto& q : queries) {
        auto it = id_index.find(q.truth_code_id);
        if (it == id_index.end())
            throw ValidationError("truth code_id " + std::to_string(q.truth_code_id) +
                                  " not in codebase");
        auto qv = encode(model, neural::tokenize(model.tokenizer, q.query));
        if (sq_norm(qv) == 0.0)
            throw DegenerateVectorError("zero embedding for query \"" + q.query + "\"");

        double truth_score = neural::cosine_sim(qv, code_vecs[it->second]);
        std::int64_t truth_id = q.truth_code_id;
        std::size_t rank = 1;
        for (std::size_t i = 0; i < codebase.size(); ++i) {
            if (i == it->second) continue;
            double score = neural::cosine_sim(qv, code_vecs[i]);
            if (score > truth_score ||
                (score == truth_score && codebase[i].code_id < truth_id))
                ++rank;
        }
        ranks.push_back(rank);
    }
    return ranks;
}

double mrr(const RankList& ranks) {
    if (ranks.empty()) throw ValidationError("mrr: empty rank list");
    double sum = 0;
    for (auto r : ranks) sum += 1.0 / static_cast<double>(r);
    return sum / static_cast<double>(ranks.size());
}

double recall_at_k(const RankList& ranks, std::size_t k) {
    if (ranks.empty()) throw ValidationError("recall_at_k: empty rank list");
    if (k < 1) throw ValidationError("recall_at_k: k must be >= 1");
    std::size_t hits = 0;
    for (auto r : ranks)
        if (r <= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double alignment_loss(const std::vector<std::pair<neural::Vec, neural::Vec>>& pairs,
                      double exponent) {
    if (pairs.empty()) throw ValidationError("alignment_loss: no pairs");
    double sum = 0;
    for (const auto& [x, y] : pairs) {
        auto nx = normalized(x, "alignment_loss");
        auto ny = normalized(y, "alignment_loss");
        sum += std::pow(std::sqrt(sq_dist(nx, ny)), exponent);
    }
    return sum / static_cast<double>(pairs.size());
}

double uniformity_loss(const std::vector<neural::Vec>& embeddings, double temperature) {
    if (embeddings.size() < 2) throw ValidationError("uniformity_loss: need >= 2 points");
    std::vector<neural::Vec> normed;
    normed.reserve(embeddings.size());
    for (const auto& e : embeddings) normed.push_back(normalized(e, "uniformity_loss"));
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < normed.size(); ++i) {
        for (std::size_t j = i + 1; j < normed.size(); ++j) {
            sum += std::exp(-temperature * sq_dist(normed[i], normed[j]));
            ++count;
        }
    }
    return std::log(sum / static_cast<double>(count));
}

EvalReport evaluate(const neural::BiEncoderParams& model, const corpus::Dataset& eval_set) {
    eval_set.validate();
    std::vector<QueryWithTruth> queries;
    queries.reserve(eval_set.pairs.size());
    std::unordered_map<std::string, std::int64_t> text_to_id;
    for (const auto& e : eval_set.codebase) text_to_id.emplace(e.code, e.code_id);
    for (const auto& p : eval_set.pairs)
        queries.push_back({p.query, text_to_id.at(p.code)});

    auto ranks = retrieve_ranks(model, queries, eval_set.codebase);
    EvalReport report;
    report.mrr = mrr(ranks);
    for (std::size_t k : {1u, 5u, 10u}) report.r_at[k] = recall_at_k(ranks, k);

    std::vector<std::pair<neural::Vec, neural::Vec>> pairs;
    std::vector<neural::Vec> pooled;
    for (const auto& p : eval_set.pairs) {
        auto qv = encode(model, neural::tokenize(model.tokenizer, p.query));
        auto cv = encode(model, neural::tokenize(model.tokenizer, p.code));
        pooled.push_back(qv);
        pooled.push_back(cv);
        pairs.emplace_back(std::move(qv), std::move(cv));
    }
    report.align_loss = alignment_loss(pairs);
    report.uniformity = pooled.size() >= 2 ? uniformity_loss(pooled) : 0.0;
    return report;
}

void EvalReport::save(const std::string& path) const {
    json r_at_json = json::object();
    for (const auto& [k, v] : r_at) r_at_json[std::to_string(k)] = v;
    json doc = {{"mrr", mrr},
                {"r_at", r_at_json},
                {"align_loss", align_loss},
                {"uniformity_loss", uniformity},
                {"seeds", seeds}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failure on " + path);
}

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// top principal direction by power iteration on the centered data
neural::Vec power_direction(const std::vector<neural::Vec>& rows, const neural::Vec& mean,
                            const neural::Vec* deflate, std::uint64_t seed) {
    const std::size_t d = mean.size();
    neural::Vec v(d);
    std::uint64_t state = seed * 0x9E3779B97F4A7C15ull + 1;
    for (auto& x : v) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        x = static_cast<double>(state % 2000) / 1000.0 - 1.0;
    }
    for (int iter = 0; iter < 50; ++iter) {
        if (deflate) {
            double proj = 0;
            for (std::size_t k = 0; k < d; ++k) proj += v[k] * (*deflate)[k];
            for (std::size_t k = 0; k < d; ++k) v[k] -= proj * (*deflate)[k];
        }
        neural::Vec next(d, 0.0);
        for (const auto& row : rows) {
            double dotp = 0;
            for (std::size_t k = 0; k < d; ++k) dotp += (row[k] - mean[k]) * v[k];
            for (std::size_t k = 0; k < d; ++k) next[k] += dotp * (row[k] - mean[k]);
        }
        double n = std::sqrt(sq_norm(next));
        if (n == 0.0) break;
        for (auto& x : next) x /= n;
        v = next;
    }
    return v;
}

}  // namespace

void export_embeddings(const neural::BiEncoderParams& model, const corpus::Dataset& dataset,
                       const std::string& path, const ExportOptions& options) {
    std::size_t count = dataset.pairs.size();
    if (options.max_pairs > 0) count = std::min(count, options.max_pairs);

    struct Row {
        std::string kind;
        std::int64_t id;
        double pair_distance;
        neural::Vec vec;
    };
    std::vector<Row> rows;
    std::vector<neural::Vec> all;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& p = dataset.pairs[i];
        auto qv = encode(model, neural::tokenize(model.tokenizer, p.query));
        auto cv = encode(model, neural::tokenize(model.tokenizer, p.code));
        double dist = std::sqrt(sq_dist(qv, cv));
        rows.push_back({"query", p.id, dist, qv});
        rows.push_back({"code", p.id, dist, cv});
        all.push_back(std::move(qv));
        all.push_back(std::move(cv));
    }

    neural::Vec p0, p1, mean;
    if (options.project && !all.empty()) {
        const std::size_t d = all[0].size();
        mean.assign(d, 0.0);
        for (const auto& v : all)
            for (std::size_t k = 0; k < d; ++k) mean[k] += v[k];
        for (auto& x : mean) x /= static_cast<double>(all.size());
        p0 = power_direction(all, mean, nullptr, 17);
        p1 = power_direction(all, mean, &p0, 43);
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "kind,id,pair_distance";
    std::size_t d = rows.empty() ? 0 : rows[0].vec.size();
    for (std::size_t k = 0; k < d; ++k) out << ",e" << k;
    if (options.project) out << ",p0,p1";
    out << "\n";
    for (const auto& row : rows) {
        out << row.kind << "," << row.id << "," << fmt9(row.pair_distance);
        for (double x : row.vec) out << "," << fmt9(x);
        if (options.project) {
            double a = 0, b = 0;
            for (std::size_t k = 0; k < row.vec.size(); ++k) {
                a += (row.vec[k] - mean[k]) * p0[k];
                b += (row.vec[k] - mean[k]) * p1[k];
            }
            out << "," << fmt9(a) << "," << fmt9(b);
        }
        out << "\n";
    }
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace augsearch::eval
