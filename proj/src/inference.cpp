#include "syngen/inference.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace syngen {

std::vector<SpanCandidate> enumerate_spans(const TokenizedText& text, std::size_t m_s, const std::string& doc_id) {
    if (m_s == 0) throw std::invalid_argument("enumerate_spans: m_s must be >= 1");
    std::vector<SpanCandidate> out;
    const std::size_t n = text.size();
    for (std::size_t begin = 0; begin < n; ++begin) {
        for (std::size_t len = 1; len <= m_s && begin + len <= n; ++len) {
            SpanCandidate c;
            c.doc_id = doc_id;
            c.token_begin = begin;
            c.token_end = begin + len;
            c.start_char = text.tokens[begin].begin;
            c.end_char = text.tokens[begin + len - 1].end;
            c.surface = std::string(text.slice(begin, begin + len));
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<SpanCandidate> select_candidates(const ScorerModel& model, std::vector<SpanCandidate> spans,
                                             double t_p) {
    if (!(t_p > 0.0 && t_p < 1.0)) throw std::invalid_argument("select_candidates: t_p must be in (0, 1)");
    // Identical model views score identically; cache them.
    std::unordered_map<std::string, double> cache;
    std::vector<SpanCandidate> kept;
    for (auto& span : spans) {
        auto view = model_view(model, span.surface);
        auto it = cache.find(view);
        if (it == cache.end()) it = cache.emplace(view, score_embedding(model, model.encoder.encode(view))).first;
        span.score = it->second;
        if (span.score > t_p) kept.push_back(std::move(span));
    }
    return kept;
}

std::string surface_key(std::string_view surface) {
    return normalize_surface(surface, false);
}

ExtractionResult greedy_extract(const std::vector<SpanCandidate>& candidates, const TokenizedText& text) {
    ExtractionResult result;
    if (candidates.empty()) return result;

    struct Surface {
        std::string key;
        std::size_t tokens = 0;
        double score = 0.0;
    };
    std::map<std::string, Surface> by_key;
    for (const auto& c : candidates) {
        if (c.token_end > text.size() || c.token_begin >= c.token_end) {
            throw std::invalid_argument("greedy_extract: candidate outside the text");
        }
        auto key = surface_key(c.surface);
        auto [it, fresh] = by_key.try_emplace(key, Surface{key, c.length(), c.score});
        if (!fresh) it->second.score = std::max(it->second.score, c.score);
    }

    std::vector<Surface> order;
    order.reserve(by_key.size());
    for (auto& [key, s] : by_key) order.push_back(s);
    std::sort(order.begin(), order.end(), [](const Surface& a, const Surface& b) {
        if (a.tokens != b.tokens) return a.tokens > b.tokens;
        if (a.score != b.score) return a.score > b.score;
        return a.key < b.key;
    });

    // Every token-aligned occurrence of every candidate surface, left to right.
    std::set<std::size_t> lengths;
    for (const auto& s : order) lengths.insert(s.tokens);
    std::unordered_map<std::string, std::vector<std::size_t>> occurrences;
    for (auto len : lengths) {
        for (std::size_t p = 0; p + len <= text.size(); ++p) {
            auto key = surface_key(text.slice(p, p + len));
            auto it = by_key.find(key);
            if (it != by_key.end() && it->second.tokens == len) occurrences[key].push_back(p);
        }
    }

    std::vector<bool> removed(text.size(), false);
    std::set<std::pair<std::size_t, std::size_t>> accepted;
    const std::string& doc_id = candidates.front().doc_id;
    for (const auto& s : order) {
        auto it = occurrences.find(s.key);
        if (it == occurrences.end()) continue;
        for (auto p : it->second) {
            std::size_t q = p + s.tokens;
            if (std::any_of(removed.begin() + static_cast<std::ptrdiff_t>(p),
                            removed.begin() + static_cast<std::ptrdiff_t>(q), [](bool r) { return r; })) {
                continue;
            }
            std::fill(removed.begin() + static_cast<std::ptrdiff_t>(p), removed.begin() + static_cast<std::ptrdiff_t>(q),
                      true);
            accepted.emplace(p, q);
            SpanCandidate e;
            e.doc_id = doc_id;
            e.token_begin = p;
            e.token_end = q;
            e.start_char = text.tokens[p].begin;
            e.end_char = text.tokens[q - 1].end;
            e.surface = std::string(text.slice(p, q));
            e.score = s.score;
            result.entities.push_back(std::move(e));
        }
    }
    std::sort(result.entities.begin(), result.entities.end(),
              [](const SpanCandidate& a, const SpanCandidate& b) { return a.token_begin < b.token_begin; });
    for (const auto& c : candidates) {
        if (!accepted.contains({c.token_begin, c.token_end})) result.suppressed.push_back(c);
    }
    return result;
}

std::vector<SpanAnnotation> to_annotations(const ExtractionResult& result, const Document& document) {
    auto cp = codepoint_offsets(document.text);
    std::vector<SpanAnnotation> out;
    out.reserve(result.entities.size());
    for (const auto& e : result.entities) {
        out.push_back({document.doc_id, cp[e.start_char], cp[e.end_char],
                       document.text.substr(e.start_char, e.end_char - e.start_char)});
    }
    std::sort(out.begin(), out.end(), [](const SpanAnnotation& a, const SpanAnnotation& b) {
        return a.start_char != b.start_char ? a.start_char < b.start_char : a.end_char < b.end_char;
    });
    return out;
}

std::vector<SpanAnnotation> predict(const ScorerModel& model, const Document& document, double t_p,
                                    std::size_t m_s) {
    auto tokens = tokenize(model.config.lowercase ? ascii_lower(document.text) : document.text);
    auto spans = enumerate_spans(tokens, m_s, document.doc_id);
    auto candidates = select_candidates(model, std::move(spans), t_p);
    return to_annotations(greedy_extract(candidates, tokens), document);
}

AnnotationSet predict_corpus(const ScorerModel& model, const Corpus& corpus, double t_p, std::size_t m_s) {
    AnnotationSet out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus.documents()) out.push_back({doc.doc_id, predict(model, doc, t_p, m_s)});
    return out;
}

}  // namespace syngen
