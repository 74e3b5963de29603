#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "syngen/scorer.hpp"
#include "syngen/text.hpp"

namespace syngen {

/// A token span [token_begin, token_end) with byte offsets into the
/// tokenized text. `score` is 0 until scored.
struct SpanCandidate {
    std::string doc_id;
    std::size_t token_begin = 0;
    std::size_t token_end = 0;
    std::size_t start_char = 0;
    std::size_t end_char = 0;
    std::string surface;
    double score = 0.0;

    std::size_t length() const noexcept { return token_end - token_begin; }
    bool operator==(const SpanCandidate&) const = default;
};

struct ExtractionResult {
    std::vector<SpanCandidate> entities;    // sorted by token_begin
    std::vector<SpanCandidate> suppressed;  // candidates not accepted
};

/// All spans of 1..m_s tokens, ordered by (begin, length).
std::vector<SpanCandidate> enumerate_spans(const TokenizedText& text, std::size_t m_s,
                                           const std::string& doc_id = {});

/// Scores every span and keeps those with score > t_p, order preserved.
std::vector<SpanCandidate> select_candidates(const ScorerModel& model, std::vector<SpanCandidate> spans,
                                             double t_p);

/// Key under which greedy extraction compares surfaces.
std::string surface_key(std::string_view surface);

/// Greedy extraction over a shrinking validation sequence. Surfaces are
/// processed longest (in tokens) first, ties by higher score then
/// lexicographically. A surface is accepted when it still occurs token-aligned
/// in the validation sequence; each such occurrence becomes an entity and its
/// tokens leave the sequence, so later matches cannot cross the gap.
ExtractionResult greedy_extract(const std::vector<SpanCandidate>& candidates, const TokenizedText& text);

/// tokenize -> enumerate -> select -> greedy extract. Offsets in the result
/// are code points into `document.text`, sorted by start_char.
std::vector<SpanAnnotation> predict(const ScorerModel& model, const Document& document, double t_p,
                                    std::size_t m_s);

AnnotationSet predict_corpus(const ScorerModel& model, const Corpus& corpus, double t_p, std::size_t m_s);

/// Converts byte-offset entities into code point annotations of `document`.
std::vector<SpanAnnotation> to_annotations(const ExtractionResult& result, const Document& document);

}  // namespace syngen
