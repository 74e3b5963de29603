#pragma once
// Reference implementations used only by tests. They share no code with the
// library beyond the model/encoder types they inspect.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "syngen/encoder.hpp"
#include "syngen/scorer.hpp"
#include "syngen/text.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Finite differences

// Every trainable parameter of a model, in a fixed order.
inline std::vector<double*> parameters(syngen::ScorerModel& model) {
    std::vector<double*> out;
    for (double& v : model.encoder.table()) out.push_back(&v);
    for (auto& layer : model.head.layers()) {
        for (double& w : layer.weight) out.push_back(&w);
        for (double& b : layer.bias) out.push_back(&b);
    }
    return out;
}

// Analytic gradients flattened in the same order as parameters().
inline std::vector<double> flatten(const syngen::ScorerModel& model, const syngen::Gradients& g) {
    std::vector<double> out;
    const std::size_t dim = model.encoder.dim();
    for (std::size_t b = 0; b < model.encoder.config().num_buckets; ++b) {
        auto row = g.table.row(static_cast<std::uint32_t>(b));
        for (std::size_t k = 0; k < dim; ++k) out.push_back(row[k]);
    }
    for (const auto& layer : g.head) {
        out.insert(out.end(), layer.weight.begin(), layer.weight.end());
        out.insert(out.end(), layer.bias.begin(), layer.bias.end());
    }
    return out;
}

inline std::vector<double> central_difference(syngen::ScorerModel& model,
                                              const std::function<double(const syngen::ScorerModel&)>& loss,
                                              double h = 1e-5) {
    auto params = parameters(model);
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        double saved = *params[i];
        *params[i] = saved + h;
        double up = loss(model);
        *params[i] = saved - h;
        double down = loss(model);
        *params[i] = saved;
        out[i] = (up - down) / (2.0 * h);
    }
    return out;
}

// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double scale = std::sqrt(std::max(na, nb));
    if (scale < 1e-300) return 0.0;
    return std::sqrt(diff) / scale;
}

// ---------------------------------------------------------------------------
// Greedy extraction

struct Term {
    std::size_t begin;
    std::size_t end;
    double score;
};

// Literal simulation of the validation sequence on a list of word tokens.
// Terms are identified by their token strings. Removed tokens are replaced by
// a sentinel that no term contains. Returns accepted (begin, end) ranges.
inline std::set<std::pair<std::size_t, std::size_t>> greedy_reference(const std::vector<std::string>& tokens,
                                                                      const std::vector<Term>& terms) {
    const std::string sentinel = "\x01";
    struct Distinct {
        std::vector<std::string> words;
        double score;
    };
    std::vector<Distinct> distinct;
    for (const auto& t : terms) {
        std::vector<std::string> words(tokens.begin() + static_cast<long>(t.begin),
                                       tokens.begin() + static_cast<long>(t.end));
        bool found = false;
        for (auto& d : distinct) {
            if (d.words == words) {
                d.score = std::max(d.score, t.score);
                found = true;
            }
        }
        if (!found) distinct.push_back({words, t.score});
    }
    auto joined = [](const std::vector<std::string>& w) {
        std::string s;
        for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
        return s;
    };
    // Longest first, then higher score, then text.
    std::sort(distinct.begin(), distinct.end(), [&](const Distinct& a, const Distinct& b) {
        if (a.words.size() != b.words.size()) return a.words.size() > b.words.size();
        if (a.score != b.score) return a.score > b.score;
        return joined(a.words) < joined(b.words);
    });

    std::vector<std::string> sequence = tokens;
    std::set<std::pair<std::size_t, std::size_t>> accepted;
    for (const auto& d : distinct) {
        const std::size_t len = d.words.size();
        std::size_t p = 0;
        while (p + len <= sequence.size()) {
            bool match = true;
            for (std::size_t k = 0; k < len && match; ++k) match = sequence[p + k] == d.words[k];
            if (!match) {
                ++p;
                continue;
            }
            accepted.emplace(p, p + len);
            for (std::size_t k = 0; k < len; ++k) sequence[p + k] = sentinel;
            p += len;
        }
    }
    return accepted;
}

// ---------------------------------------------------------------------------
// Negative filtering

// Keep flags from the full span x surface distance matrix.
inline std::vector<bool> nsf_reference(const std::vector<syngen::EmbeddingVector>& spans,
                                       const std::vector<syngen::EmbeddingVector>& surfaces, double t_d) {
    std::vector<bool> keep;
    for (const auto& s : spans) {
        std::vector<double> d;
        for (const auto& t : surfaces) {
            double sum = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k) sum += (s[k] - t[k]) * (s[k] - t[k]);
            d.push_back(std::sqrt(sum));
        }
        keep.push_back(*std::min_element(d.begin(), d.end()) > t_d);
    }
    return keep;
}

// ---------------------------------------------------------------------------
// Bound, evaluated in extended precision.

inline long double bound_reference(long double kappa, long double epsilon, long double b, long double s_total,
                                   long double s_dict, long double delta) {
    long double l = std::log(2.0L / delta);
    return (kappa * epsilon + b) * std::sqrt((std::log(s_total) + l) / 2.0L) + b * std::sqrt(l / (2.0L * s_dict));
}

// ---------------------------------------------------------------------------
// Random fixtures

inline std::string random_word(std::mt19937_64& rng, const std::string& alphabet, std::size_t min_len,
                               std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
    std::string s;
    for (std::size_t i = len(rng); i > 0; --i) s += alphabet[ch(rng)];
    return s;
}

}  // namespace oracle
