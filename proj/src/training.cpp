#include "syngen/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "syngen/seed.hpp"

namespace syngen {

namespace {

struct Forward {
    NGramBag bag;
    EmbeddingVector embedding;
};

Forward encode_for_grad(const ScorerModel& model, const std::string& text) {
    Forward f;
    f.bag = model.encoder.ngrams(model_view(model, text));
    f.embedding = model.encoder.encode_bag(f.bag);
    return f;
}

// Pushes d(loss)/d(embedding) down into the touched table rows.
void backprop_embedding(const ScorerModel& model, const Forward& f, std::span<const double> grad, Gradients& out) {
    model.encoder.backward(f.bag, grad, out.table);
}

}  // namespace

namespace {

// Each accumulate_* adds `scale` times its term's gradient into `out` and
// returns the unscaled loss.

double accumulate_classification(const ScorerModel& model, std::span<const std::string> positives,
                                 std::span<const std::string> negatives, double scale, Gradients& out) {
    if (positives.empty() || negatives.empty()) throw std::invalid_argument("classification_loss: empty batch");
    if (positives.size() != negatives.size()) {
        throw std::invalid_argument("classification_loss: positives and negatives must pair up");
    }
    const double weight = 1.0 / (2.0 * static_cast<double>(positives.size()));
    double total = 0.0;
    auto term = [&](const std::string& text, bool positive) {
        Forward f = encode_for_grad(model, text);
        HeadTrace trace;
        auto c = clamp_logit(model.head.logit(f.embedding, &trace));
        double p = sigmoid(c.value);
        // -ln p = softplus(-z); -ln(1 - p) = softplus(z)
        total += weight * (positive ? softplus(-c.value) : softplus(c.value));
        double dz = (positive ? p - 1.0 : p) * c.slope;
        if (dz != 0.0) {
            auto dr = model.head.backward(trace, scale * weight * dz, out.head);
            backprop_embedding(model, f, dr, out);
        }
    };
    for (std::size_t i = 0; i < positives.size(); ++i) {
        term(positives[i], true);
        term(negatives[i], false);
    }
    return total;
}

double accumulate_sdr(const ScorerModel& model, const std::string& anchor, const std::string& positive,
                      const std::string& negative, double gamma_s, double scale, Gradients& out) {
    Forward a = encode_for_grad(model, anchor);
    Forward p = encode_for_grad(model, positive);
    Forward n = encode_for_grad(model, negative);
    auto t = triplet_margin(a.embedding, p.embedding, n.embedding, gamma_s);
    if (t.loss > 0.0) {
        model.encoder.backward(a.bag, t.grad_anchor, out.table, scale);
        model.encoder.backward(p.bag, t.grad_positive, out.table, scale);
        model.encoder.backward(n.bag, t.grad_negative, out.table, scale);
    }
    return t.loss;
}

double accumulate_npr(const ScorerModel& model, const std::string& entity, std::span<const double> noise,
                      double scale, Gradients& out) {
    Forward f = encode_for_grad(model, entity);
    if (noise.size() != f.embedding.size()) throw std::invalid_argument("npr_loss: noise dimension mismatch");
    EmbeddingVector shifted(f.embedding);
    for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] += noise[k];

    HeadTrace clean_trace, noisy_trace;
    auto c0 = clamp_logit(model.head.logit(f.embedding, &clean_trace));
    auto c1 = clamp_logit(model.head.logit(shifted, &noisy_trace));
    double p0 = sigmoid(c0.value);
    double p1 = sigmoid(c1.value);
    double diff = p1 - p0;
    if (diff == 0.0) return 0.0;

    double sign = diff > 0.0 ? 1.0 : -1.0;
    double dz1 = sign * p1 * (1.0 - p1) * c1.slope;
    double dz0 = -sign * p0 * (1.0 - p0) * c0.slope;
    // Both evaluations depend on the same embedding, so their input gradients add.
    std::vector<double> dr(f.embedding.size(), 0.0);
    if (dz1 != 0.0) {
        auto g = model.head.backward(noisy_trace, scale * dz1, out.head);
        for (std::size_t k = 0; k < dr.size(); ++k) dr[k] += g[k];
    }
    if (dz0 != 0.0) {
        auto g = model.head.backward(clean_trace, scale * dz0, out.head);
        for (std::size_t k = 0; k < dr.size(); ++k) dr[k] += g[k];
    }
    backprop_embedding(model, f, dr, out);
    return std::abs(diff);
}

}  // namespace

LossResult classification_loss(const ScorerModel& model, std::span<const std::string> positives,
                               std::span<const std::string> negatives) {
    LossResult result{0.0, Gradients(model)};
    result.loss = accumulate_classification(model, positives, negatives, 1.0, result.grads);
    return result;
}

TripletTerm triplet_margin(std::span<const double> anchor, std::span<const double> positive,
                           std::span<const double> negative, double gamma_s) {
    const std::size_t d = anchor.size();
    TripletTerm t;
    t.grad_anchor.assign(d, 0.0);
    t.grad_positive.assign(d, 0.0);
    t.grad_negative.assign(d, 0.0);
    double d_ap = euclidean_distance(anchor, positive);
    double d_an = euclidean_distance(anchor, negative);
    double margin = d_ap - d_an + gamma_s;
    if (margin <= 0.0) return t;
    t.loss = margin;
    // The norm is not differentiable at zero; use the zero subgradient there.
    for (std::size_t k = 0; k < d; ++k) {
        double u = d_ap > 0.0 ? (anchor[k] - positive[k]) / d_ap : 0.0;
        double w = d_an > 0.0 ? (anchor[k] - negative[k]) / d_an : 0.0;
        t.grad_anchor[k] = u - w;
        t.grad_positive[k] = -u;
        t.grad_negative[k] = w;
    }
    return t;
}

LossResult sdr_loss(const ScorerModel& model, const std::string& anchor, const std::string& positive,
                    const std::string& negative, double gamma_s) {
    LossResult result{0.0, Gradients(model)};
    result.loss = accumulate_sdr(model, anchor, positive, negative, gamma_s, 1.0, result.grads);
    return result;
}

LossResult npr_loss(const ScorerModel& model, const std::string& entity, std::span<const double> noise) {
    LossResult result{0.0, Gradients(model)};
    result.loss = accumulate_npr(model, entity, noise, 1.0, result.grads);
    return result;
}

TotalLoss total_loss(const ScorerModel& model, const TrainBatch& batch, const RunConfig& config) {
    TotalLoss out;
    out.grads = Gradients(model);
    out.classification = accumulate_classification(model, batch.positives, batch.negatives, 1.0, out.grads);
    out.total = out.classification;

    if (config.alpha > 0.0 && !batch.triples.empty()) {
        const double w = 1.0 / static_cast<double>(batch.triples.size());
        for (const auto& t : batch.triples) {
            out.sdr += w * accumulate_sdr(model, t.anchor, t.positive, t.negative, config.gamma_s, config.alpha * w,
                                          out.grads);
        }
        out.total += config.alpha * out.sdr;
    }

    if (config.beta > 0.0) {
        if (batch.npr_noise.size() != batch.positives.size()) {
            throw std::invalid_argument("total_loss: need one noise vector per positive when beta > 0");
        }
        const double w = 1.0 / static_cast<double>(batch.positives.size());
        for (std::size_t i = 0; i < batch.positives.size(); ++i) {
            out.npr += w * accumulate_npr(model, batch.positives[i], batch.npr_noise[i], config.beta * w, out.grads);
        }
        out.total += config.beta * out.npr;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sampling

TrainBatch sample_batch_for(std::vector<std::string> positives, const Dictionary& dict, const NegativePool& pool,
                            std::mt19937_64& rng) {
    if (dict.empty()) throw std::invalid_argument("sample_batch: empty dictionary");
    if (pool.spans.empty()) throw std::invalid_argument("sample_batch: empty negative pool");
    TrainBatch batch;
    batch.positives = std::move(positives);
    const std::size_t n = batch.positives.size();

    std::uniform_int_distribution<std::size_t> pick_negative(0, pool.spans.size() - 1);
    for (std::size_t i = 0; i < n; ++i) batch.negatives.push_back(pool.spans[pick_negative(rng)].text);

    auto concepts = dict.synonym_concepts();
    if (!concepts.empty()) {
        std::uniform_int_distribution<std::size_t> pick_concept(0, concepts.size() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            auto members = dict.surfaces_of(concepts[pick_concept(rng)]);
            std::uniform_int_distribution<std::size_t> pick_anchor(0, members.size() - 1);
            std::uniform_int_distribution<std::size_t> pick_other(0, members.size() - 2);
            std::size_t a = pick_anchor(rng);
            std::size_t p = pick_other(rng);
            if (p >= a) ++p;
            batch.triples.push_back({dict.entries()[members[a]].surface, dict.entries()[members[p]].surface,
                                     pool.spans[pick_negative(rng)].text});
        }
    }
    return batch;
}

TrainBatch sample_batch(const Dictionary& dict, const NegativePool& pool, std::size_t batch_size,
                        std::mt19937_64& rng) {
    if (dict.empty()) throw std::invalid_argument("sample_batch: empty dictionary");
    if (batch_size == 0) throw std::invalid_argument("sample_batch: batch_size must be positive");
    std::uniform_int_distribution<std::size_t> pick(0, dict.size() - 1);
    std::vector<std::string> positives;
    for (std::size_t i = 0; i < batch_size; ++i) positives.push_back(dict.entries()[pick(rng)].surface);
    return sample_batch_for(std::move(positives), dict, pool, rng);
}

void draw_npr_noise(TrainBatch& batch, std::size_t dim, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, sigma);
    batch.npr_noise.assign(batch.positives.size(), EmbeddingVector(dim));
    for (auto& v : batch.npr_noise) {
        for (double& x : v) x = gauss(rng);
    }
}

// ---------------------------------------------------------------------------
// Training

FrozenEncoder make_frozen_encoder(const RunConfig& config) {
    if (config.frozen_embeddings) return FrozenEncoder::load_embeddings(*config.frozen_embeddings);
    EncoderConfig frozen = config.encoder;
    frozen.hash_seed = derive_seed(config.encoder.hash_seed, SeedStream::frozen_hash);
    return FrozenEncoder(frozen, derive_seed(config.seed, SeedStream::frozen_init));
}

NegativePool build_negative_pool(const Dictionary& dict, const Corpus& corpus, const RunConfig& config) {
    config.validate();
    std::mt19937_64 rng(derive_seed(config.seed, SeedStream::span_sampling));
    auto spans = sample_spans(corpus, config.negative_samples, config.negative_max_len, rng, config.lowercase);
    auto frozen = make_frozen_encoder(config);
    auto distances = nearest_dictionary_distances(spans, dict, frozen);
    double t_d = config.t_d ? *config.t_d : quantile_threshold(distances, config.t_d_quantile);
    if (!(t_d > 0.0)) t_d = std::numeric_limits<double>::min();
    return filter_by_distance(spans, distances, t_d, frozen.id());
}

void train_on_pool(ScorerModel& model, const Dictionary& dict, const NegativePool& pool, const RunConfig& config,
                   std::vector<EpochLog>* log, const EpochCallback& on_epoch) {
    config.validate();
    if (dict.empty()) throw std::invalid_argument("train: empty dictionary");
    if (config.epochs > 0 && config.alpha > 0.0 && dict.synonym_concepts().empty()) {
        std::cerr << "warning: no concept has two surfaces; synonym distance term skipped\n";
    }
    std::mt19937_64 rng(derive_seed(config.seed, SeedStream::training));
    std::vector<std::size_t> order(dict.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        EpochLog entry{epoch + 1};
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::vector<std::string> positives;
            for (std::size_t i = start; i < std::min(start + config.batch_size, order.size()); ++i) {
                positives.push_back(dict.entries()[order[i]].surface);
            }
            auto batch = sample_batch_for(std::move(positives), dict, pool, rng);
            if (config.beta > 0.0) draw_npr_noise(batch, model.encoder.dim(), config.noise_sigma, rng);
            auto loss = total_loss(model, batch, config);
            if (!std::isfinite(loss.total)) {
                std::ostringstream msg;
                msg << "non-finite loss at epoch " << epoch + 1 << " step " << entry.steps + 1
                    << " (classification=" << loss.classification << ", sdr=" << loss.sdr << ", npr=" << loss.npr
                    << ")";
                throw TrainingError(msg.str());
            }
            apply_sgd(model, loss.grads, config.lr, config.embedding_lr_scale);
            ++entry.steps;
            entry.total += loss.total;
            entry.classification += loss.classification;
            entry.sdr += loss.sdr;
            entry.npr += loss.npr;
        }
        if (entry.steps > 0) {
            const double inv = 1.0 / static_cast<double>(entry.steps);
            entry.total *= inv;
            entry.classification *= inv;
            entry.sdr *= inv;
            entry.npr *= inv;
        }
        if (log) log->push_back(entry);
        if (on_epoch) on_epoch(entry);
    }
}

TrainResult train(const Dictionary& dict, const Corpus& corpus, const RunConfig& config,
                  const EpochCallback& on_epoch) {
    config.validate();
    TrainResult result{make_model(config), build_negative_pool(dict, corpus, config), {}};
    train_on_pool(result.model, dict, result.pool, config, &result.log, on_epoch);
    return result;
}

}  // namespace syngen
