#include "augsearch/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "augsearch/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::neural {

namespace {

void check_finite(const Vec& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite weight");
}

double dot(const Vec& u, const Vec& v) {
    return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

double norm(const Vec& u) { return std::sqrt(dot(u, u)); }

Vec mean_pool(const Vec& embedding, std::size_t d, const std::vector<std::uint32_t>& ids) {
    Vec x(d, 0.0);
    for (auto id : ids) {
        const double* row = embedding.data() + static_cast<std::size_t>(id) * d;
        for (std::size_t k = 0; k < d; ++k) x[k] += row[k];
    }
    double inv = 1.0 / static_cast<double>(ids.size());
    for (auto& v : x) v *= inv;
    return x;
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

void fill_gaussian(Vec& v, std::mt19937_64& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& x : v) x = dist(rng);
}

}  // namespace

void TrainConfig::validate() const {
    if (learning_rate < 0) throw ValidationError("train config: negative learning rate");
    if (!(lr_multiplier > 0)) throw ValidationError("train config: lr multiplier must be > 0");
    if (!(temperature > 0)) throw ValidationError("train config: temperature must be > 0");
    if (batch_size < 2) throw ValidationError("train config: batch size must be >= 2");
    if (weight_decay < 0) throw ValidationError("train config: negative weight decay");
}

BiEncoderParams BiEncoderParams::init(TokenizerConfig tokenizer, std::size_t d,
                                      std::uint64_t seed) {
    tokenizer.validate();
    if (d < 8) throw ValidationError("bi-encoder: d must be >= 8");
    BiEncoderParams p;
    p.tokenizer = tokenizer;
    p.d = d;
    p.embedding.resize(tokenizer.hash_buckets * d);
    p.projection.assign(d * d, 0.0);
    p.bias.assign(d, 0.0);
    auto rng = make_rng(seed);
    fill_gaussian(p.embedding, rng, 0.5 / std::sqrt(static_cast<double>(d)));
    // near-identity projection keeps initial cosine structure intact
    Vec noise(d * d);
    fill_gaussian(noise, rng, 0.02 / std::sqrt(static_cast<double>(d)));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            p.projection[i * d + j] = (i == j ? 1.0 : 0.0) + noise[i * d + j];
    return p;
}

void BiEncoderParams::validate() const {
    tokenizer.validate();
    if (d < 8) throw ValidationError("bi-encoder: d must be >= 8");
    if (embedding.size() != tokenizer.hash_buckets * d ||
        projection.size() != d * d || bias.size() != d)
        throw ValidationError("bi-encoder: shape mismatch");
    check_finite(embedding, "bi-encoder embedding");
    check_finite(projection, "bi-encoder projection");
    check_finite(bias, "bi-encoder bias");
}

CrossEncoderParams CrossEncoderParams::init(TokenizerConfig tokenizer, std::size_t d,
                                            std::size_t h, std::uint64_t seed) {
    tokenizer.validate();
    CrossEncoderParams p;
    p.tokenizer = tokenizer;
    p.d = d;
    p.h = h;
    p.embedding.resize(tokenizer.hash_buckets * d);
    p.w1.resize(h * d);
    p.b1.assign(h, 0.0);
    p.w2.resize(h);
    auto rng = make_rng(seed);
    fill_gaussian(p.embedding, rng, 0.5 / std::sqrt(static_cast<double>(d)));
    fill_gaussian(p.w1, rng, 1.0 / std::sqrt(static_cast<double>(d)));
    fill_gaussian(p.w2, rng, 1.0 / std::sqrt(static_cast<double>(h)));
    p.b2 = 0.0;
    return p;
}

void CrossEncoderParams::validate() const {
    tokenizer.validate();
    if (embedding.size() != tokenizer.hash_buckets * d || w1.size() != h * d ||
        b1.size() != h || w2.size() != h)
        throw ValidationError("cross-encoder: shape mismatch");
    check_finite(embedding, "cross-encoder embedding");
    check_finite(w1, "cross-encoder w1");
    check_finite(b1, "cross-encoder b1");
    check_finite(w2, "cross-encoder w2");
    if (!std::isfinite(b2)) throw ValidationError("cross-encoder: non-finite b2");
}

Vec encode(const BiEncoderParams& params, const std::vector<std::uint32_t>& ids) {
    if (ids.empty()) throw ValidationError("encode: empty id list");
    const std::size_t d = params.d;
    Vec x = mean_pool(params.embedding, d, ids);
    Vec v(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = params.bias[i];
        const double* row = params.projection.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) acc += row[k] * x[k];
        v[i] = acc;
    }
    return v;
}

double cosine_sim(const Vec& u, const Vec& v) {
    double nu = norm(u), nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw DegenerateVectorError("cosine_sim: zero-norm vector");
    return dot(u, v) / (nu * nv);
}

double score_cross(const CrossEncoderParams& params,
                   const std::vector<std::uint32_t>& query_ids,
                   const std::vector<std::uint32_t>& code_ids) {
    if (query_ids.empty() || code_ids.empty())
        throw ValidationError("score_cross: empty input");
    std::vector<std::uint32_t> joint;
    joint.reserve(query_ids.size() + 1 + code_ids.size());
    joint.insert(joint.end(), query_ids.begin(), query_ids.end());
    joint.push_back(kSeparatorId);
    joint.insert(joint.end(), code_ids.begin(), code_ids.end());

    const std::size_t d = params.d, h = params.h;
    Vec x = mean_pool(params.embedding, d, joint);
    double logit = params.b2;
    for (std::size_t i = 0; i < h; ++i) {
        double z = params.b1[i];
        const double* row = params.w1.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) z += row[k] * x[k];
        logit += params.w2[i] * std::tanh(z);
    }
    return 1.0 / (1.0 + std::exp(-logit));
}

double contrastive_loss(const std::vector<Vec>& query_vecs, const std::vector<Vec>& code_vecs,
                        double tau) {
    if (query_vecs.size() != code_vecs.size() || query_vecs.empty())
        throw ValidationError("contrastive_loss: mismatched batch");
    const std::size_t bs = query_vecs.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < bs; ++i) {
        double pos = cosine_sim(query_vecs[i], code_vecs[i]) / tau;
        double max_s = pos;
        std::vector<double> sims(bs);
        for (std::size_t j = 0; j < bs; ++j) {
            sims[j] = cosine_sim(query_vecs[i], code_vecs[j]) / tau;
            max_s = std::max(max_s, sims[j]);
        }
        double denom = 0.0;
        for (double s : sims) denom += std::exp(s - max_s);
        loss += std::log(denom) + max_s - pos;
    }
    return loss / static_cast<double>(bs);
}

namespace {

// d cos(u,v) / du = v/(|u||v|) - cos * u/|u|^2
void cosine_backward(const Vec& u, const Vec& v, double g, Vec& du, Vec& dv) {
    double nu = norm(u), nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw DegenerateVectorError("cosine grad: zero-norm vector");
    double c = dot(u, v) / (nu * nv);
    for (std::size_t k = 0; k < u.size(); ++k) {
        du[k] += g * (v[k] / (nu * nv) - c * u[k] / (nu * nu));
        dv[k] += g * (u[k] / (nu * nv) - c * v[k] / (nv * nv));
    }
}

struct BiForward {
    Vec pooled;  // x
    Vec out;     // P x + b
};

BiForward bi_forward(const BiEncoderParams& p, const std::vector<std::uint32_t>& ids) {
    BiForward f;
    f.pooled = mean_pool(p.embedding, p.d, ids);
    f.out.assign(p.d, 0.0);
    for (std::size_t i = 0; i < p.d; ++i) {
        double acc = p.bias[i];
        const double* row = p.projection.data() + i * p.d;
        for (std::size_t k = 0; k < p.d; ++k) acc += row[k] * f.pooled[k];
        f.out[i] = acc;
    }
    return f;
}

// dv -> accumulate into dP, db, and embedding rows
void bi_backward(const BiEncoderParams& p, const std::vector<std::uint32_t>& ids,
                 const BiForward& f, const Vec& dv, BiGradients& g) {
    const std::size_t d = p.d;
    Vec dx(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        g.bias[i] += dv[i];
        const double* row = p.projection.data() + i * d;
        double* grow = g.projection.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) {
            grow[k] += dv[i] * f.pooled[k];
            dx[k] += row[k] * dv[i];
        }
    }
    double inv = 1.0 / static_cast<double>(ids.size());
    for (auto id : ids) {
        double* row = g.embedding.data() + static_cast<std::size_t>(id) * d;
        for (std::size_t k = 0; k < d; ++k) row[k] += dx[k] * inv;
    }
}

}  // namespace

double bi_loss_and_gradients(const BiEncoderParams& params,
                             const std::vector<TokenizedPair>& batch, double tau,
                             BiGradients* grads) {
    const std::size_t bs = batch.size();
    if (bs == 0) throw ValidationError("empty batch");
    const std::size_t d = params.d;

    std::vector<BiForward> qf(bs), cf(bs);
    for (std::size_t i = 0; i < bs; ++i) {
        qf[i] = bi_forward(params, batch[i].query_ids);
        cf[i] = bi_forward(params, batch[i].code_ids);
    }

    std::vector<std::vector<double>> sims(bs, std::vector<double>(bs));
    for (std::size_t i = 0; i < bs; ++i)
        for (std::size_t j = 0; j < bs; ++j)
            sims[i][j] = cosine_sim(qf[i].out, cf[j].out) / tau;

    double loss = 0.0;
    std::vector<std::vector<double>> softmax(bs, std::vector<double>(bs));
    for (std::size_t i = 0; i < bs; ++i) {
        double max_s = *std::max_element(sims[i].begin(), sims[i].end());
        double denom = 0.0;
        for (std::size_t j = 0; j < bs; ++j) denom += std::exp(sims[i][j] - max_s);
        for (std::size_t j = 0; j < bs; ++j) softmax[i][j] = std::exp(sims[i][j] - max_s) / denom;
        loss += std::log(denom) + max_s - sims[i][i];
    }
    loss /= static_cast<double>(bs);

    if (grads) {
        grads->embedding.assign(params.embedding.size(), 0.0);
        grads->projection.assign(params.projection.size(), 0.0);
        grads->bias.assign(params.bias.size(), 0.0);
        std::vector<Vec> dq(bs, Vec(d, 0.0)), dc(bs, Vec(d, 0.0));
        for (std::size_t i = 0; i < bs; ++i) {
            for (std::size_t j = 0; j < bs; ++j) {
                double g = (softmax[i][j] - (i == j ? 1.0 : 0.0)) /
                           (static_cast<double>(bs) * tau);
                if (g != 0.0) cosine_backward(qf[i].out, cf[j].out, g, dq[i], dc[j]);
            }
        }
        for (std::size_t i = 0; i < bs; ++i) {
            bi_backward(params, batch[i].query_ids, qf[i], dq[i], *grads);
            bi_backward(params, batch[i].code_ids, cf[i], dc[i], *grads);
        }
    }
    return loss;
}

double cross_loss_and_gradients(const CrossEncoderParams& params,
                                const std::vector<CrossExample>& batch,
                                CrossGradients* grads) {
    if (batch.empty()) throw ValidationError("empty batch");
    const std::size_t d = params.d, h = params.h;
    if (grads) {
        grads->embedding.assign(params.embedding.size(), 0.0);
        grads->w1.assign(params.w1.size(), 0.0);
        grads->b1.assign(params.b1.size(), 0.0);
        grads->w2.assign(params.w2.size(), 0.0);
        grads->b2 = 0.0;
    }
    double loss = 0.0;
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const auto& ex : batch) {
        std::vector<std::uint32_t> joint;
        joint.reserve(ex.query_ids.size() + 1 + ex.code_ids.size());
        joint.insert(joint.end(), ex.query_ids.begin(), ex.query_ids.end());
        joint.push_back(kSeparatorId);
        joint.insert(joint.end(), ex.code_ids.begin(), ex.code_ids.end());

        Vec x = mean_pool(params.embedding, d, joint);
        Vec a(h);
        double logit = params.b2;
        for (std::size_t i = 0; i < h; ++i) {
            double z = params.b1[i];
            const double* row = params.w1.data() + i * d;
            for (std::size_t k = 0; k < d; ++k) z += row[k] * x[k];
            a[i] = std::tanh(z);
            logit += params.w2[i] * a[i];
        }
        double p = 1.0 / (1.0 + std::exp(-logit));
        // numerically stable BCE via softplus
        double bce = (logit > 0 ? logit : 0.0) - logit * ex.label +
                     std::log1p(std::exp(-std::abs(logit)));
        loss += scale * bce;

        if (grads) {
            double dlogit = scale * (p - ex.label);
            grads->b2 += dlogit;
            Vec dx(d, 0.0);
            for (std::size_t i = 0; i < h; ++i) {
                grads->w2[i] += dlogit * a[i];
                double dz = dlogit * params.w2[i] * (1.0 - a[i] * a[i]);
                grads->b1[i] += dz;
                const double* row = params.w1.data() + i * d;
                double* grow = grads->w1.data() + i * d;
                for (std::size_t k = 0; k < d; ++k) {
                    grow[k] += dz * x[k];
                    dx[k] += dz * row[k];
                }
            }
            double inv = 1.0 / static_cast<double>(joint.size());
            for (auto id : joint) {
                double* row = grads->embedding.data() + static_cast<std::size_t>(id) * d;
                for (std::size_t k = 0; k < d; ++k) row[k] += dx[k] * inv;
            }
        }
    }
    return loss;
}

// ---- AdamW ----

namespace {

struct AdamState {
    Vec m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adamw_step(Vec& theta, const Vec& grad, AdamState& state, double lr, double wd,
                long step) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        theta[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * theta[i]);
    }
}

std::vector<TokenizedPair> tokenize_dataset(const corpus::Dataset& dataset,
                                            const TokenizerConfig& tokenizer) {
    std::vector<TokenizedPair> out;
    out.reserve(dataset.pairs.size());
    for (const auto& p : dataset.pairs)
        out.push_back({tokenize(tokenizer, p.query), tokenize(tokenizer, p.code)});
    return out;
}

}  // namespace

BiEncoderParams train_bi_encoder(const corpus::Dataset& dataset, const TrainConfig& config,
                                 TokenizerConfig tokenizer, std::size_t d, TrainTrace* trace) {
    config.validate();
    if (dataset.pairs.size() < config.batch_size)
        throw ValidationError("train_bi_encoder: dataset smaller than one batch");
    auto data = tokenize_dataset(dataset, tokenizer);
    auto params = BiEncoderParams::init(tokenizer, d, config.seed);

    AdamState s_emb(params.embedding.size()), s_proj(params.projection.size()),
        s_bias(params.bias.size());
    std::mt19937_64 rng(config.seed ^ 0xda7a5e11ull);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    const double lr = config.effective_lr();
    long step = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + 1 < order.size(); start += config.batch_size) {
            std::size_t end = std::min(start + config.batch_size, order.size());
            if (end - start < 2) break;  // contrastive needs in-batch negatives
            std::vector<TokenizedPair> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);

            BiGradients grads;
            double loss = bi_loss_and_gradients(params, batch, config.temperature, &grads);
            ++step;
            if (!std::isfinite(loss))
                throw DivergenceError("bi-encoder training diverged at step " +
                                          std::to_string(step),
                                      step);
            epoch_loss += loss;
            ++batches;
            adamw_step(params.embedding, grads.embedding, s_emb, lr, config.weight_decay, step);
            adamw_step(params.projection, grads.projection, s_proj, lr, config.weight_decay,
                       step);
            adamw_step(params.bias, grads.bias, s_bias, lr, 0.0, step);
        }
        if (trace) trace->epoch_mean_loss.push_back(batches ? epoch_loss / batches : 0.0);
    }
    return params;
}

CrossEncoderParams train_cross_encoder(const corpus::Dataset& dataset,
                                       const TrainConfig& config, TokenizerConfig tokenizer,
                                       std::size_t d, std::size_t h, TrainTrace* trace) {
    config.validate();
    if (dataset.pairs.size() < config.batch_size)
        throw ValidationError("train_cross_encoder: dataset smaller than one batch");
    auto data = tokenize_dataset(dataset, tokenizer);
    auto params = CrossEncoderParams::init(tokenizer, d, h, config.seed);

    AdamState s_emb(params.embedding.size()), s_w1(params.w1.size()), s_b1(params.b1.size()),
        s_w2(params.w2.size());
    Vec b2_vec{params.b2};
    AdamState s_b2(1);
    std::mt19937_64 rng(config.seed ^ 0xcafef00dull);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    const double lr = config.effective_lr();
    long step = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + 1 < order.size(); start += config.batch_size) {
            std::size_t end = std::min(start + config.batch_size, order.size());
            if (end - start < 2) break;
            std::vector<CrossExample> batch;
            for (std::size_t i = start; i < end; ++i) {
                const auto& pos = data[order[i]];
                batch.push_back({pos.query_ids, pos.code_ids, 1.0});
                // one in-batch mismatched code per positive; skip codes that
                // tokenize identically to the positive's (not real negatives)
                for (std::size_t attempt = 0; attempt < end - start; ++attempt) {
                    std::size_t j = start + rng() % (end - start - 1);
                    if (j >= i) ++j;
                    if (data[order[j]].code_ids == pos.code_ids) continue;
                    batch.push_back({pos.query_ids, data[order[j]].code_ids, 0.0});
                    break;
                }
            }
            CrossGradients grads;
            double loss = cross_loss_and_gradients(params, batch, &grads);
            ++step;
            if (!std::isfinite(loss))
                throw DivergenceError("cross-encoder training diverged at step " +
                                          std::to_string(step),
                                      step);
            epoch_loss += loss;
            ++batches;
            adamw_step(params.embedding, grads.embedding, s_emb, lr, config.weight_decay, step);
            adamw_step(params.w1, grads.w1, s_w1, lr, config.weight_decay, step);
            adamw_step(params.b1, grads.b1, s_b1, lr, 0.0, step);
            adamw_step(params.w2, grads.w2, s_w2, lr, config.weight_decay, step);
            Vec gb2{grads.b2};
            b2_vec[0] = params.b2;
            adamw_step(b2_vec, gb2, s_b2, lr, 0.0, step);
            params.b2 = b2_vec[0];
        }
        if (trace) trace->epoch_mean_loss.push_back(batches ? epoch_loss / batches : 0.0);
    }
    return params;
}

// ---- gradient check ----

double gradient_check(LossKind kind, BiEncoderParams bi_params,
                      CrossEncoderParams cross_params,
                      const std::vector<TokenizedPair>& batch, double epsilon,
                      std::uint64_t seed, std::size_t coords) {
    if (epsilon < 1e-6 || epsilon > 1e-3)
        throw ValidationError("gradient_check: epsilon out of range");
    std::mt19937_64 rng(seed);

    std::vector<CrossExample> cross_batch;
    if (kind == LossKind::CrossBce) {
        for (std::size_t i = 0; i < batch.size(); ++i) {
            cross_batch.push_back({batch[i].query_ids, batch[i].code_ids, 1.0});
            cross_batch.push_back(
                {batch[i].query_ids, batch[(i + 1) % batch.size()].code_ids, 0.0});
        }
    }

    std::vector<std::pair<double*, std::size_t>> spans;
    Vec analytic;
    if (kind == LossKind::Contrastive) {
        BiGradients grads;
        bi_loss_and_gradients(bi_params, batch, 0.5, &grads);
        spans = {{bi_params.embedding.data(), bi_params.embedding.size()},
                 {bi_params.projection.data(), bi_params.projection.size()},
                 {bi_params.bias.data(), bi_params.bias.size()}};
        analytic.insert(analytic.end(), grads.embedding.begin(), grads.embedding.end());
        analytic.insert(analytic.end(), grads.projection.begin(), grads.projection.end());
        analytic.insert(analytic.end(), grads.bias.begin(), grads.bias.end());
    } else {
        CrossGradients grads;
        cross_loss_and_gradients(cross_params, cross_batch, &grads);
        spans = {{cross_params.embedding.data(), cross_params.embedding.size()},
                 {cross_params.w1.data(), cross_params.w1.size()},
                 {cross_params.b1.data(), cross_params.b1.size()},
                 {cross_params.w2.data(), cross_params.w2.size()},
                 {&cross_params.b2, 1}};
        analytic.insert(analytic.end(), grads.embedding.begin(), grads.embedding.end());
        analytic.insert(analytic.end(), grads.w1.begin(), grads.w1.end());
        analytic.insert(analytic.end(), grads.b1.begin(), grads.b1.end());
        analytic.insert(analytic.end(), grads.w2.begin(), grads.w2.end());
        analytic.push_back(grads.b2);
    }

    auto loss_at = [&]() {
        if (kind == LossKind::Contrastive)
            return bi_loss_and_gradients(bi_params, batch, 0.5, nullptr);
        return cross_loss_and_gradients(cross_params, cross_batch, nullptr);
    };

    std::size_t total = 0;
    for (auto& [ptr, n] : spans) total += n;
    double max_rel = 0.0;
    std::size_t sample = std::min(coords, total);
    for (std::size_t s = 0; s < sample; ++s) {
        std::size_t flat = rng() % total;
        double* coord = nullptr;
        std::size_t offset = flat;
        for (auto& [ptr, n] : spans) {
            if (offset < n) {
                coord = ptr + offset;
                break;
            }
            offset -= n;
        }
        double saved = *coord;
        *coord = saved + epsilon;
        double lp = loss_at();
        *coord = saved - epsilon;
        double lm = loss_at();
        *coord = saved;
        double numeric = (lp - lm) / (2.0 * epsilon);
        double a = analytic[flat];
        double rel = std::abs(a - numeric) / std::max(1e-6, std::abs(a) + std::abs(numeric));
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

// ---- checkpoints: JSON header + raw little-endian doubles ----

namespace {

constexpr char kMagic[8] = {'A', 'S', 'C', 'K', '0', '1', '\n', '\0'};

void write_doubles(std::ofstream& out, const Vec& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, Vec& v, std::size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError("checkpoint truncated");
}

void write_header(std::ofstream& out, const json& header) {
    out.write(kMagic, sizeof(kMagic));
    std::string text = header.dump();
    std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json read_header(std::ifstream& in, const std::string& path) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw ValidationError("not a checkpoint file: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("checkpoint truncated: " + path);
    return json::parse(text);
}

json tokenizer_header(const TokenizerConfig& t) {
    return {{"hash_buckets", t.hash_buckets},
            {"lowercase", t.lowercase},
            {"max_tokens", t.max_tokens}};
}

TokenizerConfig tokenizer_from_header(const json& j) {
    TokenizerConfig t;
    t.hash_buckets = j.at("hash_buckets").get<std::size_t>();
    t.lowercase = j.at("lowercase").get<bool>();
    t.max_tokens = j.at("max_tokens").get<std::size_t>();
    return t;
}

}  // namespace

void save_bi_checkpoint(const BiEncoderParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_header(out, {{"type", "bi"}, {"d", params.d},
                       {"tokenizer", tokenizer_header(params.tokenizer)}});
    write_doubles(out, params.embedding);
    write_doubles(out, params.projection);
    write_doubles(out, params.bias);
    if (!out) throw IoError("write failure on " + path);
}

BiEncoderParams load_bi_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    json header = read_header(in, path);
    if (header.value("type", "") != "bi")
        throw ValidationError("checkpoint is not a bi-encoder: " + path);
    BiEncoderParams p;
    p.tokenizer = tokenizer_from_header(header.at("tokenizer"));
    p.d = header.at("d").get<std::size_t>();
    read_doubles(in, p.embedding, p.tokenizer.hash_buckets * p.d);
    read_doubles(in, p.projection, p.d * p.d);
    read_doubles(in, p.bias, p.d);
    p.validate();
    return p;
}

void save_cross_checkpoint(const CrossEncoderParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_header(out, {{"type", "cross"}, {"d", params.d}, {"h", params.h},
                       {"tokenizer", tokenizer_header(params.tokenizer)}});
    write_doubles(out, params.embedding);
    write_doubles(out, params.w1);
    write_doubles(out, params.b1);
    write_doubles(out, params.w2);
    Vec b2{params.b2};
    write_doubles(out, b2);
    if (!out) throw IoError("write failure on " + path);
}

CrossEncoderParams load_cross_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    json header = read_header(in, path);
    if (header.value("type", "") != "cross")
        throw ValidationError("checkpoint is not a cross-encoder: " + path);
    CrossEncoderParams p;
    p.tokenizer = tokenizer_from_header(header.at("tokenizer"));
    p.d = header.at("d").get<std::size_t>();
    p.h = header.at("h").get<std::size_t>();
    read_doubles(in, p.embedding, p.tokenizer.hash_buckets * p.d);
    read_doubles(in, p.w1, p.h * p.d);
    read_doubles(in, p.b1, p.h);
    read_doubles(in, p.w2, p.h);
    Vec b2;
    read_doubles(in, b2, 1);
    p.b2 = b2[0];
    p.validate();
    return p;
}

}  // namespace augsearch::neural
