#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "syngen/config.hpp"
#include "syngen/scorer.hpp"
#include "syngen/training.hpp"

namespace fixture {

// A model small enough to finite-difference every parameter.
inline syngen::RunConfig tiny_config(std::mt19937_64& rng) {
    syngen::RunConfig c;
    std::uniform_int_distribution<std::size_t> dim(3, 6), buckets(12, 40), width(2, 6), depth(0, 2);
    c.encoder.dim = dim(rng);
    c.encoder.num_buckets = buckets(rng);
    c.encoder.ngram_min = 2;
    c.encoder.ngram_max = 3;
    c.encoder.init_scale = 0.7;
    c.encoder.hash_seed = rng();
    c.hidden.clear();
    for (std::size_t i = depth(rng); i > 0; --i) c.hidden.push_back(width(rng));
    c.seed = rng();
    c.gamma_s = 1.5;
    c.noise_sigma = 0.3;
    c.alpha = 0.7;
    c.beta = 0.4;
    return c;
}

inline std::vector<std::string> words(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(oracle::random_word(rng, "abcdefg", 1, 6));
    return out;
}

struct GradientInstance {
    syngen::ScorerModel model;
    syngen::TrainBatch batch;
    syngen::RunConfig config;
};

// Random model and batch away from the non-differentiable points (hinge at 0,
// |x| at 0, logit clamp), where central differences say nothing.
inline GradientInstance gradient_instance(std::mt19937_64& rng) {
    for (;;) {
        auto config = tiny_config(rng);
        auto model = syngen::make_model(config);
        std::uniform_int_distribution<std::size_t> count(1, 4);
        std::size_t n = count(rng);
        syngen::TrainBatch batch;
        batch.positives = words(rng, n);
        batch.negatives = words(rng, n);
        for (std::size_t i = 0; i < n; ++i) {
            auto w = words(rng, 3);
            batch.triples.push_back({w[0], w[1], w[2]});
        }
        syngen::draw_npr_noise(batch, config.encoder.dim, config.noise_sigma, rng);

        bool smooth = true;
        auto logit_ok = [&](const std::string& s) {
            return std::abs(model.head.logit(model.encoder.encode(s))) < syngen::kLogitClamp - 1.0;
        };
        for (std::size_t i = 0; i < n && smooth; ++i) {
            smooth = logit_ok(batch.positives[i]) && logit_ok(batch.negatives[i]);
            auto a = model.encoder.encode(batch.triples[i].anchor);
            auto p = model.encoder.encode(batch.triples[i].positive);
            auto q = model.encoder.encode(batch.triples[i].negative);
            double margin = syngen::euclidean_distance(a, p) - syngen::euclidean_distance(a, q) + config.gamma_s;
            double d_ap = syngen::euclidean_distance(a, p), d_an = syngen::euclidean_distance(a, q);
            if (std::abs(margin) < 1e-3 || d_ap < 1e-6 || d_an < 1e-6) smooth = false;
            auto r = model.encoder.encode(batch.positives[i]);
            auto shifted = r;
            for (std::size_t k = 0; k < r.size(); ++k) shifted[k] += batch.npr_noise[i][k];
            double diff = syngen::score_embedding(model, shifted) - syngen::score_embedding(model, r);
            if (std::abs(diff) < 1e-7) smooth = false;
        }
        if (smooth) return {std::move(model), std::move(batch), config};
    }
}

}  // namespace fixture
