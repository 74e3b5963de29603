#include "syngen/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "syngen/text.hpp"

namespace syngen {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

double euclidean_norm(std::span<const double> a) {
    double sum = 0.0;
    for (double x : a) sum += x * x;
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------

void RowGradient::add(std::uint32_t bucket, std::span<const double> grad, double scale) {
    auto& row = rows_[bucket];
    if (row.empty()) row.assign(dim_, 0.0);
    for (std::size_t k = 0; k < dim_; ++k) row[k] += scale * grad[k];
}

void RowGradient::add(const RowGradient& other, double scale) {
    for (const auto& [bucket, grad] : other.rows_) add(bucket, grad, scale);
}

void RowGradient::scale(double factor) {
    for (auto& [bucket, grad] : rows_) {
        for (double& g : grad) g *= factor;
    }
}

std::vector<double> RowGradient::row(std::uint32_t bucket) const {
    auto it = rows_.find(bucket);
    return it == rows_.end() ? std::vector<double>(dim_, 0.0) : it->second;
}

// ---------------------------------------------------------------------------

namespace {

// FNV-1a, seeded by folding the seed into the offset basis.
std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    // Final avalanche so nearby n-grams spread across buckets.
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

void validate(const EncoderConfig& c) {
    if (c.dim == 0) throw std::invalid_argument("encoder dim must be positive");
    if (c.ngram_min == 0 || c.ngram_min > c.ngram_max) throw std::invalid_argument("need 1 <= ngram_min <= ngram_max");
    if (c.num_buckets == 0 || c.num_buckets > (std::size_t{1} << 32)) {
        throw std::invalid_argument("num_buckets must be in [1, 2^32]");
    }
}

}  // namespace

CharNGramEncoder::CharNGramEncoder(EncoderConfig config) : config_(config) {
    validate(config_);
    table_.assign(config_.num_buckets * config_.dim, 0.0);
}

CharNGramEncoder CharNGramEncoder::random(EncoderConfig config, std::uint64_t init_seed) {
    CharNGramEncoder enc(config);
    std::mt19937_64 rng(init_seed);
    std::normal_distribution<double> gauss(0.0, config.init_scale);
    for (double& w : enc.table_) w = gauss(rng);
    return enc;
}

NGramBag CharNGramEncoder::ngrams(std::string_view text) const {
    std::string normalized = normalize_surface(text, false);
    if (normalized.empty()) throw std::invalid_argument("cannot encode empty text");
    std::string padded = "<" + normalized + ">";

    std::vector<std::uint32_t> buckets;
    for (std::size_t n = config_.ngram_min; n <= config_.ngram_max && n <= padded.size(); ++n) {
        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
            auto h = hash_bytes(std::string_view(padded).substr(i, n), config_.hash_seed);
            buckets.push_back(static_cast<std::uint32_t>(h % config_.num_buckets));
        }
    }
    // Strings shorter than ngram_min hash as a single gram.
    if (buckets.empty()) {
        buckets.push_back(static_cast<std::uint32_t>(hash_bytes(padded, config_.hash_seed) % config_.num_buckets));
    }

    std::sort(buckets.begin(), buckets.end());
    const double unit = 1.0 / static_cast<double>(buckets.size());
    NGramBag bag;
    for (auto b : buckets) {
        if (!bag.empty() && bag.back().first == b) {
            bag.back().second += unit;
        } else {
            bag.emplace_back(b, unit);
        }
    }
    return bag;
}

EmbeddingVector CharNGramEncoder::encode_bag(const NGramBag& bag) const {
    EmbeddingVector out(config_.dim, 0.0);
    for (const auto& [bucket, weight] : bag) {
        auto r = row(bucket);
        for (std::size_t k = 0; k < config_.dim; ++k) out[k] += weight * r[k];
    }
    return out;
}

EmbeddingVector CharNGramEncoder::encode(std::string_view text) const {
    return encode_bag(ngrams(text));
}

void CharNGramEncoder::backward(const NGramBag& bag, std::span<const double> grad_output, RowGradient& into,
                                double scale) const {
    for (const auto& [bucket, weight] : bag) into.add(bucket, grad_output, scale * weight);
}

void CharNGramEncoder::apply(const RowGradient& grad, double step) {
    for (const auto& [bucket, g] : grad.rows()) {
        auto r = row(bucket);
        for (std::size_t k = 0; k < config_.dim; ++k) r[k] += step * g[k];
    }
}

// ---------------------------------------------------------------------------

FrozenEncoder::FrozenEncoder(EncoderConfig config, std::uint64_t init_seed) : dim_(config.dim) {
    encoder_.push_back(CharNGramEncoder::random(config, init_seed));
    id_ = "charngram:d=" + std::to_string(config.dim) + ":buckets=" + std::to_string(config.num_buckets) +
          ":n=" + std::to_string(config.ngram_min) + "-" + std::to_string(config.ngram_max) +
          ":hash_seed=" + std::to_string(config.hash_seed) + ":init_seed=" + std::to_string(init_seed);
}

FrozenEncoder FrozenEncoder::from_embeddings(std::unordered_map<std::string, EmbeddingVector> vectors,
                                             std::string source) {
    if (vectors.empty()) throw std::invalid_argument("embedding lookup is empty");
    FrozenEncoder enc;
    enc.dim_ = vectors.begin()->second.size();
    for (const auto& [text, v] : vectors) {
        if (v.size() != enc.dim_) throw std::invalid_argument("inconsistent embedding dimension for '" + text + "'");
    }
    enc.lookup_ = std::move(vectors);
    enc.id_ = "external:" + source + ":n=" + std::to_string(enc.lookup_.size());
    return enc;
}

FrozenEncoder FrozenEncoder::load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::unordered_map<std::string, EmbeddingVector> vectors;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (normalize_surface(line, false).empty()) continue;
        try {
            auto record = nlohmann::json::parse(line);
            auto v = record.at("vector").get<EmbeddingVector>();
            for (double x : v) {
                if (!std::isfinite(x)) throw ParseError("non-finite embedding value", lineno);
            }
            vectors[normalize_surface(record.at("text").get<std::string>(), false)] = std::move(v);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad embedding record: ") + e.what(), lineno);
        }
    }
    return from_embeddings(std::move(vectors), path.filename().string());
}

EmbeddingVector FrozenEncoder::encode(std::string_view text) const {
    if (!encoder_.empty()) return encoder_.front().encode(text);
    auto key = normalize_surface(text, false);
    if (key.empty()) throw std::invalid_argument("cannot encode empty text");
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw std::out_of_range("no external embedding for '" + key + "'");
    return it->second;
}

}  // namespace syngen
