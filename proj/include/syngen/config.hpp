#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "syngen/encoder.hpp"

namespace syngen {

/// Every tunable of a run. Defaults follow the NCBI column of the published
/// search space where one exists.
struct RunConfig {
    std::uint64_t seed = 42;
    bool lowercase = true;

    EncoderConfig encoder{};
    std::vector<std::size_t> hidden{64};

    // Objective
    double alpha = 0.1;
    double beta = 0.1;
    double gamma_s = 1.0;
    double noise_sigma = 0.1;

    // Optimization
    double lr = 1.0;
    /// Multiplier on lr for embedding-table rows. Mean pooling hands each row
    /// only its n-gram share of the gradient.
    double embedding_lr_scale = 30.0;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;

    // Negative mining. When t_d is unset it is calibrated as the t_d_quantile
    // of sampled-span nearest-dictionary distances.
    std::optional<double> t_d;
    double t_d_quantile = 0.10;
    std::size_t negative_samples = 5000;
    std::size_t negative_max_len = 8;
    std::optional<std::string> frozen_embeddings;

    // Inference
    double t_p = 0.5;
    std::size_t m_s = 8;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Applies SYNGEN_SEED from the environment when set.
void apply_seed_override(RunConfig& config);

}  // namespace syngen
