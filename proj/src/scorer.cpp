#include "syngen/scorer.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "syngen/seed.hpp"
#include "syngen/text.hpp"

namespace syngen {

using json = nlohmann::json;

MlpHead::MlpHead(std::size_t input_dim, const std::vector<std::size_t>& hidden) {
    if (input_dim == 0) throw std::invalid_argument("head input dimension must be positive");
    std::size_t in = input_dim;
    for (auto width : hidden) {
        layers_.emplace_back(in, width);
        in = width;
    }
    layers_.emplace_back(in, 1);
}

MlpHead MlpHead::random(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    MlpHead head(input_dim, hidden);
    std::mt19937_64 rng(seed);
    for (auto& layer : head.layers_) {
        double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        for (double& w : layer.weight) w = uniform(rng);
    }
    return head;
}

double MlpHead::logit(std::span<const double> input, HeadTrace* trace) const {
    if (input.size() != input_dim()) {
        throw std::invalid_argument("embedding has dimension " + std::to_string(input.size()) + ", head expects " +
                                    std::to_string(input_dim()));
    }
    std::vector<double> x(input.begin(), input.end());
    if (trace) trace->inputs.clear();
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        std::vector<double> y(layer.bias);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* w = layer.weight.data() + o * layer.in;
            double sum = 0.0;
            for (std::size_t i = 0; i < layer.in; ++i) sum += w[i] * x[i];
            y[o] += sum;
        }
        const bool last = l + 1 == layers_.size();
        if (!last) {
            for (double& v : y) v = std::tanh(v);
        }
        if (trace) trace->inputs.push_back(std::move(x));
        x = std::move(y);
    }
    if (trace) trace->raw_logit = x[0];
    return x[0];
}

std::vector<double> MlpHead::backward(const HeadTrace& trace, double scale, std::vector<DenseLayer>& grad) const {
    // delta holds d(logit)/d(pre-activation output) of the current layer.
    std::vector<double> delta{scale};
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const auto& x = trace.inputs[l];
        auto& g = grad[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            g.bias[o] += delta[o];
            double* gw = g.weight.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) gw[i] += delta[o] * x[i];
        }
        std::vector<double> dx(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* w = layer.weight.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) dx[i] += delta[o] * w[i];
        }
        if (l > 0) {
            // x is tanh output of the previous layer.
            for (std::size_t i = 0; i < layer.in; ++i) dx[i] *= 1.0 - x[i] * x[i];
        }
        delta = std::move(dx);
    }
    return delta;
}

std::vector<DenseLayer> zeros_like(const MlpHead& head) {
    std::vector<DenseLayer> out;
    for (const auto& layer : head.layers()) out.emplace_back(layer.in, layer.out);
    return out;
}

// ---------------------------------------------------------------------------

ScorerModel make_model(const RunConfig& config) {
    config.validate();
    return ScorerModel{
        CharNGramEncoder::random(config.encoder, derive_seed(config.seed, SeedStream::encoder_init)),
        MlpHead::random(config.encoder.dim, config.hidden, derive_seed(config.seed, SeedStream::head_init)),
        config,
    };
}

ScorerModel make_zero_model(const RunConfig& config) {
    config.validate();
    return ScorerModel{CharNGramEncoder(config.encoder), MlpHead(config.encoder.dim, config.hidden), config};
}

Gradients::Gradients(const ScorerModel& model) : table(model.encoder.dim()), head(zeros_like(model.head)) {}

void Gradients::add(const Gradients& other, double scale) {
    table.add(other.table, scale);
    if (head.empty()) {
        head = other.head;
        for (auto& layer : head) {
            for (double& w : layer.weight) w *= scale;
            for (double& b : layer.bias) b *= scale;
        }
        return;
    }
    for (std::size_t l = 0; l < head.size(); ++l) {
        for (std::size_t k = 0; k < head[l].weight.size(); ++k) head[l].weight[k] += scale * other.head[l].weight[k];
        for (std::size_t k = 0; k < head[l].bias.size(); ++k) head[l].bias[k] += scale * other.head[l].bias[k];
    }
}

void Gradients::scale(double factor) {
    table.scale(factor);
    for (auto& layer : head) {
        for (double& w : layer.weight) w *= factor;
        for (double& b : layer.bias) b *= factor;
    }
}

void apply_sgd(ScorerModel& model, const Gradients& grad, double lr, double table_scale) {
    model.encoder.apply(grad.table, -lr * table_scale);
    auto& layers = model.head.layers();
    for (std::size_t l = 0; l < layers.size() && l < grad.head.size(); ++l) {
        for (std::size_t k = 0; k < layers[l].weight.size(); ++k) layers[l].weight[k] -= lr * grad.head[l].weight[k];
        for (std::size_t k = 0; k < layers[l].bias.size(); ++k) layers[l].bias[k] -= lr * grad.head[l].bias[k];
    }
}

double score_embedding(const ScorerModel& model, std::span<const double> embedding) {
    return sigmoid(clamp_logit(model.head.logit(embedding)).value);
}

std::string model_view(const ScorerModel& model, std::string_view text) {
    return normalize_surface(text, model.config.lowercase);
}

double score_text(const ScorerModel& model, std::string_view text) {
    return score_embedding(model, model.encoder.encode(model_view(model, text)));
}

std::vector<double> score_texts(const ScorerModel& model, std::span<const std::string> texts) {
    std::vector<double> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(score_text(model, t));
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

json checkpoint_json(const ScorerModel& model) {
    const auto& enc = model.encoder;
    json table = json::array();
    for (std::size_t b = 0; b < enc.config().num_buckets; ++b) {
        auto row = enc.row(b);
        table.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json layers = json::array();
    for (const auto& layer : model.head.layers()) {
        json w = json::array();
        for (std::size_t o = 0; o < layer.out; ++o) {
            w.push_back(std::vector<double>(layer.weight.begin() + static_cast<std::ptrdiff_t>(o * layer.in),
                                            layer.weight.begin() + static_cast<std::ptrdiff_t>((o + 1) * layer.in)));
        }
        layers.push_back({{"w", std::move(w)}, {"b", layer.bias}});
    }
    return json{{"version", model.version},
                {"config", to_json(model.config)},
                {"encoder_table", std::move(table)},
                {"head_layers", std::move(layers)}};
}

ScorerModel model_from_checkpoint(const json& j) {
    try {
        if (!j.is_object()) throw LoadError("checkpoint must be a JSON object");
        int version = j.at("version").get<int>();
        if (version != ScorerModel::kVersion) {
            throw LoadError("unsupported checkpoint version " + std::to_string(version));
        }
        RunConfig config = config_from_json(j.at("config"));
        ScorerModel model = make_zero_model(config);
        model.version = version;

        const auto& table = j.at("encoder_table");
        if (!table.is_array() || table.size() != config.encoder.num_buckets) {
            throw LoadError("encoder_table must have num_buckets rows");
        }
        for (std::size_t b = 0; b < table.size(); ++b) {
            const auto& row = table[b];
            if (!row.is_array() || row.size() != config.encoder.dim) throw LoadError("encoder_table row has wrong width");
            auto dst = model.encoder.row(b);
            for (std::size_t k = 0; k < row.size(); ++k) dst[k] = row[k].get<double>();
        }

        const auto& layers = j.at("head_layers");
        auto& dst_layers = model.head.layers();
        if (!layers.is_array() || layers.size() != dst_layers.size()) {
            throw LoadError("head_layers does not match the configured architecture");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto& dst = dst_layers[l];
            const auto& w = layers[l].at("w");
            const auto& b = layers[l].at("b");
            if (w.size() != dst.out || b.size() != dst.out) throw LoadError("head layer has wrong shape");
            for (std::size_t o = 0; o < dst.out; ++o) {
                if (w[o].size() != dst.in) throw LoadError("head layer has wrong shape");
                for (std::size_t i = 0; i < dst.in; ++i) dst.w(o, i) = w[o][i].get<double>();
                dst.bias[o] = b[o].get<double>();
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw LoadError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_model(const ScorerModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, checkpoint_json(model).dump() + "\n");
}

ScorerModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open checkpoint " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    return model_from_checkpoint(j);
}

}  // namespace syngen
