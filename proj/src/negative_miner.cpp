#include "syngen/negative_miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace syngen {

using json = nlohmann::json;

std::vector<SampledSpan> sample_spans(const Corpus& corpus, std::size_t n, std::size_t max_len,
                                      std::mt19937_64& rng, bool lowercase) {
    if (n == 0) throw std::invalid_argument("sample_spans: n must be positive");
    if (max_len == 0) throw std::invalid_argument("sample_spans: max_len must be positive");

    struct Indexed {
        const Document* doc;
        TokenizedText tokens;
        std::vector<std::size_t> cp;
    };
    std::vector<Indexed> docs;
    for (const auto& doc : corpus.documents()) {
        auto tok = tokenize(doc.text);
        if (tok.size() == 0) continue;
        auto cp = codepoint_offsets(doc.text);
        docs.push_back({&doc, std::move(tok), std::move(cp)});
    }
    if (docs.empty()) throw std::invalid_argument("sample_spans: corpus has no tokens");

    std::uniform_int_distribution<std::size_t> pick_doc(0, docs.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_len(1, max_len);
    std::vector<SampledSpan> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& d = docs[pick_doc(rng)];
        std::uniform_int_distribution<std::size_t> pick_start(0, d.tokens.size() - 1);
        std::size_t first = pick_start(rng);
        std::size_t last = std::min(first + pick_len(rng), d.tokens.size());
        auto begin = d.tokens.tokens[first].begin;
        auto end = d.tokens.tokens[last - 1].end;
        std::string text = normalize_surface(std::string_view(d.doc->text).substr(begin, end - begin), lowercase);
        out.push_back({std::move(text), d.doc->doc_id, d.cp[begin], d.cp[end]});
    }
    return out;
}

std::vector<double> nearest_dictionary_distances(const std::vector<SampledSpan>& spans, const Dictionary& dict,
                                                 const FrozenEncoder& frozen) {
    if (dict.empty()) throw std::invalid_argument("cannot filter negatives against an empty dictionary");
    std::vector<EmbeddingVector> surfaces;
    surfaces.reserve(dict.size());
    for (const auto& e : dict.entries()) surfaces.push_back(frozen.encode(e.surface));

    std::vector<double> out;
    out.reserve(spans.size());
    for (const auto& span : spans) {
        auto v = frozen.encode(span.text);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : surfaces) best = std::min(best, squared_distance(s, v));
        out.push_back(std::sqrt(best));
    }
    return out;
}

NegativePool filter_by_distance(const std::vector<SampledSpan>& spans, const std::vector<double>& distances,
                                double t_d, const std::string& frozen_encoder_id) {
    if (!(t_d > 0.0)) throw std::invalid_argument("t_d must be positive");
    if (spans.size() != distances.size()) throw std::invalid_argument("one distance per span required");
    NegativePool pool{{}, t_d, frozen_encoder_id};
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (distances[i] > t_d) pool.spans.push_back(spans[i]);
    }
    if (pool.spans.empty()) {
        throw std::runtime_error("no negative spans survive filtering at t_d=" + std::to_string(t_d) +
                                 "; lower t_d");
    }
    return pool;
}

NegativePool filter_negatives(const std::vector<SampledSpan>& spans, const Dictionary& dict,
                              const FrozenEncoder& frozen, double t_d) {
    if (!(t_d > 0.0)) throw std::invalid_argument("t_d must be positive");
    return filter_by_distance(spans, nearest_dictionary_distances(spans, dict, frozen), t_d, frozen.id());
}

double quantile_threshold(std::vector<double> distances, double q) {
    if (distances.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(distances.begin(), distances.end());
    auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(distances.size() - 1)));
    return distances[idx];
}

void save_pool(const NegativePool& pool, const std::filesystem::path& path) {
    std::string out = json{{"t_d", pool.t_d},
                           {"frozen_encoder_id", pool.frozen_encoder_id},
                           {"count", pool.spans.size()}}
                          .dump();
    out += '\n';
    for (const auto& s : pool.spans) {
        out += json{{"text", s.text}, {"doc_id", s.doc_id}, {"start_char", s.start_char}, {"end_char", s.end_char}}
                   .dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

NegativePool load_pool(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    NegativePool pool;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto record = json::parse(line);
            if (lineno == 1) {
                pool.t_d = record.at("t_d").get<double>();
                pool.frozen_encoder_id = record.at("frozen_encoder_id").get<std::string>();
                expected = record.at("count").get<std::size_t>();
                continue;
            }
            pool.spans.push_back({record.at("text").get<std::string>(), record.at("doc_id").get<std::string>(),
                                  record.at("start_char").get<std::size_t>(),
                                  record.at("end_char").get<std::size_t>()});
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad pool record: ") + e.what(), lineno);
        }
    }
    if (lineno == 0) throw ParseError("pool file is empty", 0);
    if (pool.spans.size() != expected) throw ParseError("pool header count does not match records", 0);
    return pool;
}

}  // namespace syngen
