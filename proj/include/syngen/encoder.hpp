#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace syngen {

using EmbeddingVector = std::vector<double>;

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> a);

struct EncoderConfig {
    std::size_t dim = 64;
    std::size_t ngram_min = 3;
    std::size_t ngram_max = 5;
    std::size_t num_buckets = std::size_t{1} << 16;
    std::uint64_t hash_seed = 0;
    /// Standard deviation of the Gaussian table initialization.
    double init_scale = 0.3;

    bool operator==(const EncoderConfig&) const = default;
};

/// Hashed n-gram multiset of one string: (bucket, weight) pairs sorted by
/// bucket, weights summing to one. The encoding is sum(weight * row).
using NGramBag = std::vector<std::pair<std::uint32_t, double>>;

/// Sparse gradient over embedding-table rows.
class RowGradient {
public:
    explicit RowGradient(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    void add(std::uint32_t bucket, std::span<const double> grad, double scale);
    void add(const RowGradient& other, double scale);
    void scale(double factor);

    const std::unordered_map<std::uint32_t, std::vector<double>>& rows() const noexcept { return rows_; }
    /// Row gradient, zero if never touched.
    std::vector<double> row(std::uint32_t bucket) const;

private:
    std::size_t dim_;
    std::unordered_map<std::uint32_t, std::vector<double>> rows_;
};

/// Mean of hashed character n-gram embeddings over `<text>`.
class CharNGramEncoder {
public:
    /// Zero-initialized table.
    explicit CharNGramEncoder(EncoderConfig config);
    /// Gaussian(0, init_scale^2) table, deterministic in `init_seed`.
    static CharNGramEncoder random(EncoderConfig config, std::uint64_t init_seed);

    const EncoderConfig& config() const noexcept { return config_; }
    std::size_t dim() const noexcept { return config_.dim; }

    /// Throws std::invalid_argument when `text` is blank.
    NGramBag ngrams(std::string_view text) const;
    EmbeddingVector encode(std::string_view text) const;
    EmbeddingVector encode_bag(const NGramBag& bag) const;
    /// Chain rule through encode: adds weight * grad_output to each touched row.
    void backward(const NGramBag& bag, std::span<const double> grad_output, RowGradient& into,
                  double scale = 1.0) const;

    std::span<double> row(std::size_t bucket) { return {table_.data() + bucket * config_.dim, config_.dim}; }
    std::span<const double> row(std::size_t bucket) const {
        return {table_.data() + bucket * config_.dim, config_.dim};
    }
    std::vector<double>& table() noexcept { return table_; }
    const std::vector<double>& table() const noexcept { return table_; }

    void apply(const RowGradient& grad, double step);

    bool operator==(const CharNGramEncoder&) const = default;

private:
    EncoderConfig config_;
    std::vector<double> table_;  // num_buckets x dim, row-major
};

/// The reference encoder used for negative filtering. Either a frozen random
/// n-gram encoder or a lookup over precomputed vectors.
class FrozenEncoder {
public:
    FrozenEncoder(EncoderConfig config, std::uint64_t init_seed);
    /// Vectors keyed by normalized text; lookups that miss throw.
    static FrozenEncoder from_embeddings(std::unordered_map<std::string, EmbeddingVector> vectors,
                                         std::string source);
    static FrozenEncoder load_embeddings(const std::filesystem::path& path);

    EmbeddingVector encode(std::string_view text) const;
    std::size_t dim() const noexcept { return dim_; }
    const std::string& id() const noexcept { return id_; }

private:
    FrozenEncoder() = default;

    std::vector<CharNGramEncoder> encoder_;  // empty in lookup mode
    std::unordered_map<std::string, EmbeddingVector> lookup_;
    std::size_t dim_ = 0;
    std::string id_;
};

/// Convenience wrapper matching the reference-encoder role.
inline EmbeddingVector encode_frozen(const FrozenEncoder& ref, std::string_view text) { return ref.encode(text); }

}  // namespace syngen
