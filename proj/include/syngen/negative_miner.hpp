#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "syngen/encoder.hpp"
#include "syngen/text.hpp"

namespace syngen {

/// A corpus span; offsets are code points into the source document.
struct SampledSpan {
    std::string text;
    std::string doc_id;
    std::size_t start_char = 0;
    std::size_t end_char = 0;

    bool operator==(const SampledSpan&) const = default;
};

/// Filtered negatives: every span lies farther than t_d from every
/// dictionary surface under the frozen encoder.
struct NegativePool {
    std::vector<SampledSpan> spans;
    double t_d = 0.0;
    std::string frozen_encoder_id;

    bool operator==(const NegativePool&) const = default;
};

/// n spans: uniform document (among those with tokens), uniform start token,
/// uniform length in [1, max_len] clipped at the document end. Span text is
/// the document substring, case folded when `lowercase`.
std::vector<SampledSpan> sample_spans(const Corpus& corpus, std::size_t n, std::size_t max_len,
                                      std::mt19937_64& rng, bool lowercase = true);

/// min over dictionary surfaces of ||F(surface) - F(span)|| for each span.
std::vector<double> nearest_dictionary_distances(const std::vector<SampledSpan>& spans, const Dictionary& dict,
                                                 const FrozenEncoder& frozen);

/// Keeps spans with nearest distance strictly greater than t_d. Throws if none survive.
NegativePool filter_negatives(const std::vector<SampledSpan>& spans, const Dictionary& dict,
                              const FrozenEncoder& frozen, double t_d);

/// Same decision as filter_negatives with distances already computed.
NegativePool filter_by_distance(const std::vector<SampledSpan>& spans, const std::vector<double>& distances,
                                double t_d, const std::string& frozen_encoder_id);

/// The q-quantile (lower interpolation) of `distances`.
double quantile_threshold(std::vector<double> distances, double q);

/// JSON-lines: a header {"t_d", "frozen_encoder_id", "count"} then one
/// {"text", "doc_id", "start_char", "end_char"} per span.
void save_pool(const NegativePool& pool, const std::filesystem::path& path);
NegativePool load_pool(const std::filesystem::path& path);

}  // namespace syngen
