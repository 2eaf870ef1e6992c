#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "augsearch/corpus.hpp"
#include "augsearch/tokenizer.hpp"

namespace augsearch::neural {

using Vec = std::vector<double>;

// Mean-pooled hashed-embedding encoder with a single affine projection.
struct BiEncoderParams {
    TokenizerConfig tokenizer;
    std::size_t d = 64;
    Vec embedding;   // hash_buckets x d, row-major
    Vec projection;  // d x d, row-major
    Vec bias;        // d

    static BiEncoderParams init(TokenizerConfig tokenizer, std::size_t d, std::uint64_t seed);
    void validate() const;
};

// Mean-pooled encoder over [query, SEP, code] with a d -> h -> 1 head,
// tanh between the layers and a logistic output.
struct CrossEncoderParams {
    TokenizerConfig tokenizer;
    std::size_t d = 64;
    std::size_t h = 64;
    Vec embedding;  // hash_buckets x d
    Vec w1;         // h x d
    Vec b1;         // h
    Vec w2;         // h
    double b2 = 0;

    static CrossEncoderParams init(TokenizerConfig tokenizer, std::size_t d, std::size_t h,
                                   std::uint64_t seed);
    void validate() const;
};

struct TrainConfig {
    double learning_rate = 3e-5;   // cross-encoder default: 8e-5
    double lr_multiplier = 1.0;    // scale knob for from-scratch tiny models
    double weight_decay = 0.001;   // cross-encoder default: 0.01
    std::size_t batch_size = 32;
    double temperature = 0.05;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;

    void validate() const;
    double effective_lr() const { return learning_rate * lr_multiplier; }
};

Vec encode(const BiEncoderParams& params, const std::vector<std::uint32_t>& ids);
double cosine_sim(const Vec& u, const Vec& v);
double score_cross(const CrossEncoderParams& params, const std::vector<std::uint32_t>& query_ids,
                   const std::vector<std::uint32_t>& code_ids);

// -(1/bs) sum_i log( exp(sim(q_i,c_i)/tau) / sum_j exp(sim(q_i,c_j)/tau) )
double contrastive_loss(const std::vector<Vec>& query_vecs, const std::vector<Vec>& code_vecs,
                        double tau);

struct TrainTrace {
    std::vector<double> epoch_mean_loss;
};

BiEncoderParams train_bi_encoder(const corpus::Dataset& dataset, const TrainConfig& config,
                                 TokenizerConfig tokenizer, std::size_t d, TrainTrace* trace = nullptr);
CrossEncoderParams train_cross_encoder(const corpus::Dataset& dataset, const TrainConfig& config,
                                       TokenizerConfig tokenizer, std::size_t d, std::size_t h,
                                       TrainTrace* trace = nullptr);

// ---- gradient machinery (exposed for finite-difference validation) ----

struct TokenizedPair {
    std::vector<std::uint32_t> query_ids;
    std::vector<std::uint32_t> code_ids;
};

struct BiGradients {
    Vec embedding, projection, bias;
};

struct CrossGradients {
    Vec embedding, w1, b1, w2;
    double b2 = 0;
};

double bi_loss_and_gradients(const BiEncoderParams& params,
                             const std::vector<TokenizedPair>& batch, double tau,
                             BiGradients* grads);

struct CrossExample {
    std::vector<std::uint32_t> query_ids;
    std::vector<std::uint32_t> code_ids;
    double label = 1.0;
};

double cross_loss_and_gradients(const CrossEncoderParams& params,
                                const std::vector<CrossExample>& batch, CrossGradients* grads);

enum class LossKind { Contrastive, CrossBce };

// Max relative error between analytic and central finite-difference
// gradients over a random subsample of coordinates.
double gradient_check(LossKind kind, BiEncoderParams bi_params, CrossEncoderParams cross_params,
                      const std::vector<TokenizedPair>& batch, double epsilon,
                      std::uint64_t seed, std::size_t coords = 200);

// ---- checkpoints ----

void save_bi_checkpoint(const BiEncoderParams& params, const std::string& path);
BiEncoderParams load_bi_checkpoint(const std::string& path);
void save_cross_checkpoint(const CrossEncoderParams& params, const std::string& path);
CrossEncoderParams load_cross_checkpoint(const std::string& path);

}  // namespace augsearch::neural
