#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "syngen/config.hpp"
#include "syngen/scorer.hpp"
#include "syngen/text.hpp"

namespace syngen {

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    /// Rates from counts; a rate with a zero denominator is 0.
    static PrfScore from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
    bool operator==(const PrfScore&) const = default;
};

/// Exact span match on (doc_id, start_char, end_char), duplicates collapsed.
/// Throws if a prediction names a document the gold set does not contain.
PrfScore evaluate(const AnnotationSet& predictions, const AnnotationSet& gold);

/// Token-aligned exact dictionary lookup, nesting resolved by greedy extraction.
std::vector<SpanAnnotation> exact_match_baseline(const Dictionary& dict, const Document& document,
                                                 bool lowercase = true);
AnnotationSet exact_match_baseline(const Dictionary& dict, const Corpus& corpus, bool lowercase = true);

/// Mean E-space distance between same-concept surfaces. Samples n_pairs
/// (concept uniform, then two distinct surfaces); when n_pairs covers every
/// unordered synonym pair the exact mean over all pairs is returned instead.
double synonym_distance_probe(const ScorerModel& model, const Dictionary& dict, std::size_t n_pairs,
                              std::uint64_t seed);

/// Mean over texts and Gaussian draws v of |p(r + v) - p(r)| / ||v||.
/// A plug-in estimate of the scorer's local Lipschitz constant, not a bound.
double lipschitz_probe(const ScorerModel& model, std::span<const std::string> texts, std::size_t n_draws,
                       double noise_sigma, std::uint64_t seed);

struct SweepPoint {
    double ratio = 0.0;
    PrfScore score;
    std::uint64_t seed = 0;
};

/// For each ratio: subsample, train, predict over `corpus`, score against `gold`.
std::vector<SweepPoint> few_shot_sweep(const Dictionary& dict, const Corpus& corpus, const AnnotationSet& gold,
                                       std::span<const double> ratios, const RunConfig& config);

/// "ratio,precision,recall,f1,seed" header plus one row per point.
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace syngen
