#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "syngen/config.hpp"
#include "syngen/encoder.hpp"

namespace syngen {

/// Logits are clamped to [-kLogitClamp, kLogitClamp] before the sigmoid.
inline constexpr double kLogitClamp = 30.0;

/// Upper end of the per-entity loss range: -ln sigmoid(-kLogitClamp).
inline double loss_upper_bound() { return std::log1p(std::exp(kLogitClamp)); }

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Numerically stable ln(1 + e^z).
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  // out x in, row-major
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim)
        : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

    double& w(std::size_t o, std::size_t i) { return weight[o * in + i]; }
    double w(std::size_t o, std::size_t i) const { return weight[o * in + i]; }

    bool operator==(const DenseLayer&) const = default;
};

/// Activations kept from a forward pass for the backward pass.
struct HeadTrace {
    std::vector<std::vector<double>> inputs;  // input to each layer
    double raw_logit = 0.0;
};

/// tanh MLP ending in a single logit.
class MlpHead {
public:
    MlpHead() = default;
    /// Zero-initialized layers chaining input_dim -> hidden... -> 1.
    MlpHead(std::size_t input_dim, const std::vector<std::size_t>& hidden);
    /// Uniform(+-sqrt(6/(in+out))) weights, zero biases.
    static MlpHead random(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::uint64_t seed);

    std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    /// Unclamped logit.
    double logit(std::span<const double> input, HeadTrace* trace = nullptr) const;

    /// Accumulates scale * d(raw logit)/d(params) into `grad` (same shape) and
    /// returns d(raw logit)/d(input) times scale.
    std::vector<double> backward(const HeadTrace& trace, double scale, std::vector<DenseLayer>& grad) const;

    bool operator==(const MlpHead&) const = default;

private:
    std::vector<DenseLayer> layers_;
};

/// Zero-valued layers shaped like `head`.
std::vector<DenseLayer> zeros_like(const MlpHead& head);

/// Encoder + head: p(text) = sigmoid(clamp(MLP(E(text)))).
struct ScorerModel {
    static constexpr int kVersion = 1;

    CharNGramEncoder encoder;
    MlpHead head;
    RunConfig config;
    int version = kVersion;

    bool operator==(const ScorerModel&) const = default;
};

/// Random encoder table and head seeded from config.seed.
ScorerModel make_model(const RunConfig& config);
/// All-zero encoder table and head; every score is exactly 0.5.
ScorerModel make_zero_model(const RunConfig& config);

/// Parameter gradients: sparse over table rows, dense over the head.
struct Gradients {
    RowGradient table;
    std::vector<DenseLayer> head;

    Gradients() = default;
    explicit Gradients(const ScorerModel& model);
    void add(const Gradients& other, double scale = 1.0);
    void scale(double factor);
};

/// Plain SGD step: head -= lr * grad, table rows -= lr * table_scale * grad.
void apply_sgd(ScorerModel& model, const Gradients& grad, double lr, double table_scale = 1.0);

/// Clamped logit and d(clamped)/d(raw) in {0, 1}.
struct ClampedLogit {
    double value;
    double slope;
};
inline ClampedLogit clamp_logit(double z) {
    if (z > kLogitClamp) return {kLogitClamp, 0.0};
    if (z < -kLogitClamp) return {-kLogitClamp, 0.0};
    return {z, 1.0};
}

double score_embedding(const ScorerModel& model, std::span<const double> embedding);
/// Applies the model's case folding, then encodes and scores.
double score_text(const ScorerModel& model, std::string_view text);
std::vector<double> score_texts(const ScorerModel& model, std::span<const std::string> texts);

/// Text as the model sees it (whitespace collapsed, case folded per config).
std::string model_view(const ScorerModel& model, std::string_view text);

class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json checkpoint_json(const ScorerModel& model);
ScorerModel model_from_checkpoint(const nlohmann::json& j);
/// Atomic write of the JSON checkpoint.
void save_model(const ScorerModel& model, const std::filesystem::path& path);
/// Throws LoadError on I/O, parse, version or shape problems.
ScorerModel load_model(const std::filesystem::path& path);

}  // namespace syngen
