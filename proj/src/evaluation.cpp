#include "syngen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "syngen/inference.hpp"
#include "syngen/training.hpp"

namespace syngen {

PrfScore PrfScore::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PrfScore s;
    s.tp = tp;
    s.fp = fp;
    s.fn = fn;
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

PrfScore evaluate(const AnnotationSet& predictions, const AnnotationSet& gold) {
    using Key = std::tuple<std::string, std::size_t, std::size_t>;
    std::set<std::string> gold_docs;
    std::set<Key> gold_spans;
    for (const auto& doc : gold) {
        gold_docs.insert(doc.doc_id);
        for (const auto& a : doc.spans) gold_spans.emplace(doc.doc_id, a.start_char, a.end_char);
    }
    std::set<Key> predicted;
    for (const auto& doc : predictions) {
        if (!gold_docs.contains(doc.doc_id)) {
            throw std::invalid_argument("prediction for unknown document '" + doc.doc_id + "'");
        }
        for (const auto& a : doc.spans) predicted.emplace(doc.doc_id, a.start_char, a.end_char);
    }
    std::size_t tp = 0;
    for (const auto& k : predicted) tp += gold_spans.contains(k) ? 1 : 0;
    return PrfScore::from_counts(tp, predicted.size() - tp, gold_spans.size() - tp);
}

std::vector<SpanAnnotation> exact_match_baseline(const Dictionary& dict, const Document& document, bool lowercase) {
    std::unordered_set<std::string> surfaces;
    std::size_t max_tokens = 0;
    for (const auto& e : dict.entries()) {
        surfaces.insert(surface_key(e.surface));
        max_tokens = std::max(max_tokens, tokenize(e.surface).size());
    }
    auto tokens = tokenize(lowercase ? ascii_lower(document.text) : document.text);
    std::vector<SpanCandidate> matches;
    if (max_tokens > 0) {
        for (auto& span : enumerate_spans(tokens, max_tokens, document.doc_id)) {
            if (!surfaces.contains(surface_key(span.surface))) continue;
            span.score = 1.0;
            matches.push_back(std::move(span));
        }
    }
    return to_annotations(greedy_extract(matches, tokens), document);
}

AnnotationSet exact_match_baseline(const Dictionary& dict, const Corpus& corpus, bool lowercase) {
    AnnotationSet out;
    for (const auto& doc : corpus.documents()) out.push_back({doc.doc_id, exact_match_baseline(dict, doc, lowercase)});
    return out;
}

double synonym_distance_probe(const ScorerModel& model, const Dictionary& dict, std::size_t n_pairs,
                              std::uint64_t seed) {
    auto concepts = dict.synonym_concepts();
    if (concepts.empty()) throw std::invalid_argument("synonym_distance_probe: no concept has two surfaces");
    if (n_pairs == 0) throw std::invalid_argument("synonym_distance_probe: n_pairs must be positive");

    std::vector<EmbeddingVector> encoded(dict.size());
    auto embedding = [&](std::size_t idx) -> const EmbeddingVector& {
        if (encoded[idx].empty()) encoded[idx] = model.encoder.encode(model_view(model, dict.entries()[idx].surface));
        return encoded[idx];
    };

    std::size_t total_pairs = 0;
    for (const auto& c : concepts) {
        auto k = dict.surfaces_of(c).size();
        total_pairs += k * (k - 1) / 2;
    }
    double sum = 0.0;
    if (n_pairs >= total_pairs) {
        for (const auto& c : concepts) {
            auto members = dict.surfaces_of(c);
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    sum += euclidean_distance(embedding(members[i]), embedding(members[j]));
                }
            }
        }
        return sum / static_cast<double>(total_pairs);
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_concept(0, concepts.size() - 1);
    for (std::size_t n = 0; n < n_pairs; ++n) {
        auto members = dict.surfaces_of(concepts[pick_concept(rng)]);
        std::uniform_int_distribution<std::size_t> pick_a(0, members.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_b(0, members.size() - 2);
        std::size_t a = pick_a(rng);
        std::size_t b = pick_b(rng);
        if (b >= a) ++b;
        sum += euclidean_distance(embedding(members[a]), embedding(members[b]));
    }
    return sum / static_cast<double>(n_pairs);
}

double lipschitz_probe(const ScorerModel& model, std::span<const std::string> texts, std::size_t n_draws,
                       double noise_sigma, std::uint64_t seed) {
    if (texts.empty()) throw std::invalid_argument("lipschitz_probe: no texts");
    if (n_draws == 0) throw std::invalid_argument("lipschitz_probe: n_draws must be >= 1");
    if (!(noise_sigma > 0.0)) throw std::invalid_argument("lipschitz_probe: noise_sigma must be > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_sigma);
    const std::size_t d = model.encoder.dim();
    double sum = 0.0;
    for (const auto& text : texts) {
        auto r = model.encoder.encode(model_view(model, text));
        double p0 = score_embedding(model, r);
        for (std::size_t k = 0; k < n_draws; ++k) {
            EmbeddingVector v(d);
            double norm = 0.0;
            while (norm == 0.0) {
                for (double& x : v) x = gauss(rng);
                norm = euclidean_norm(v);
            }
            EmbeddingVector shifted(r);
            for (std::size_t i = 0; i < d; ++i) shifted[i] += v[i];
            sum += std::abs(score_embedding(model, shifted) - p0) / norm;
        }
    }
    return sum / static_cast<double>(texts.size() * n_draws);
}

std::vector<SweepPoint> few_shot_sweep(const Dictionary& dict, const Corpus& corpus, const AnnotationSet& gold,
                                       std::span<const double> ratios, const RunConfig& config) {
    if (!std::is_sorted(ratios.begin(), ratios.end())) throw std::invalid_argument("sweep ratios must be sorted");
    std::vector<SweepPoint> out;
    for (double ratio : ratios) {
        auto sub = subsample_dictionary(dict, ratio, config.seed);
        auto result = train(sub, corpus, config);
        auto predictions = predict_corpus(result.model, corpus, config.t_p, config.m_s);
        out.push_back({ratio, evaluate(predictions, gold), config.seed});
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "ratio,precision,recall,f1,seed\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%g,%.6f,%.6f,%.6f,%llu\n", p.ratio, p.score.precision, p.score.recall,
                      p.score.f1, static_cast<unsigned long long>(p.seed));
        out += buf;
    }
    return out;
}

}  // namespace syngen
