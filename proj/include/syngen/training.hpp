#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "syngen/config.hpp"
#include "syngen/negative_miner.hpp"
#include "syngen/scorer.hpp"
#include "syngen/text.hpp"

namespace syngen {

struct SynonymTriple {
    std::string anchor;
    std::string positive;
    std::string negative;
};

struct TrainBatch {
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
    std::vector<SynonymTriple> triples;
    /// One perturbation per positive; consumed by the noise regularizer.
    std::vector<EmbeddingVector> npr_noise;
};

struct LossResult {
    double loss = 0.0;
    Gradients grads;
};

/// Mean over pairs of -[ln p(pos) + ln(1 - p(neg))] / 2.
LossResult classification_loss(const ScorerModel& model, std::span<const std::string> positives,
                                std::span<const std::string> negatives);

/// Triplet margin on already-encoded vectors, with gradients per vector.
struct TripletTerm {
    double loss = 0.0;
    EmbeddingVector grad_anchor, grad_positive, grad_negative;
};
TripletTerm triplet_margin(std::span<const double> anchor, std::span<const double> positive,
                           std::span<const double> negative, double gamma_s);

/// max(||E(a) - E(p)|| - ||E(a) - E(n)|| + gamma_s, 0).
LossResult sdr_loss(const ScorerModel& model, const std::string& anchor, const std::string& positive,
                    const std::string& negative, double gamma_s);

/// |p(E(entity) + noise) - p(E(entity))|, noise held constant.
LossResult npr_loss(const ScorerModel& model, const std::string& entity, std::span<const double> noise);

struct TotalLoss {
    double total = 0.0;
    double classification = 0.0;
    double sdr = 0.0;  // mean over triples, before alpha
    double npr = 0.0;  // mean over positives, before beta
    Gradients grads;
};

/// L_c + alpha * mean(R_s) + beta * mean(R_n). The SDR term is skipped when the
/// batch has no triples; the NPR term needs one noise vector per positive
/// whenever beta > 0.
TotalLoss total_loss(const ScorerModel& model, const TrainBatch& batch, const RunConfig& config);

/// Positives uniform over entries, negatives uniform over the pool, triples
/// uniform over multi-surface concepts; batch_size of each.
TrainBatch sample_batch(const Dictionary& dict, const NegativePool& pool, std::size_t batch_size,
                        std::mt19937_64& rng);

/// Same as sample_batch with the positives fixed by the caller.
TrainBatch sample_batch_for(std::vector<std::string> positives, const Dictionary& dict, const NegativePool& pool,
                            std::mt19937_64& rng);

/// Fills batch.npr_noise with i.i.d. Gaussian(0, sigma^2) vectors.
void draw_npr_noise(TrainBatch& batch, std::size_t dim, double sigma, std::mt19937_64& rng);

struct EpochLog {
    std::size_t epoch = 0;
    std::size_t steps = 0;
    double total = 0.0;
    double classification = 0.0;
    double sdr = 0.0;
    double npr = 0.0;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainResult {
    ScorerModel model;
    NegativePool pool;
    std::vector<EpochLog> log;
};

/// Samples and filters corpus negatives with the frozen encoder.
NegativePool build_negative_pool(const Dictionary& dict, const Corpus& corpus, const RunConfig& config);

/// The reference encoder a run uses: external vectors if configured, otherwise
/// a random n-gram encoder with its own hash and init seeds.
FrozenEncoder make_frozen_encoder(const RunConfig& config);

using EpochCallback = std::function<void(const EpochLog&)>;

/// SGD over epochs; each epoch visits every dictionary entry once as a
/// positive in shuffled order.
void train_on_pool(ScorerModel& model, const Dictionary& dict, const NegativePool& pool, const RunConfig& config,
                   std::vector<EpochLog>* log = nullptr, const EpochCallback& on_epoch = {});

TrainResult train(const Dictionary& dict, const Corpus& corpus, const RunConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace syngen
