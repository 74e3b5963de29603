#include "syngen/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace syngen {

using json = nlohmann::json;

void RunConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
    };
    require(encoder.dim > 0, "encoder_dim must be > 0");
    require(encoder.ngram_min >= 1 && encoder.ngram_min <= encoder.ngram_max, "need 1 <= ngram_min <= ngram_max");
    require(encoder.num_buckets > 0, "num_buckets must be > 0");
    require(encoder.init_scale >= 0.0 && std::isfinite(encoder.init_scale), "init_scale must be >= 0");
    for (auto h : hidden) require(h > 0, "hidden widths must be > 0");
    require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be >= 0");
    require(beta >= 0.0 && std::isfinite(beta), "beta must be >= 0");
    require(gamma_s > 0.0, "gamma_s must be > 0");
    require(noise_sigma > 0.0, "noise_sigma must be > 0");
    require(lr > 0.0 && std::isfinite(lr), "lr must be > 0");
    require(embedding_lr_scale > 0.0 && std::isfinite(embedding_lr_scale), "embedding_lr_scale must be > 0");
    require(batch_size > 0, "batch_size must be > 0");
    require(!t_d || *t_d > 0.0, "t_d must be > 0");
    require(t_d_quantile >= 0.0 && t_d_quantile < 1.0, "t_d_quantile must be in [0, 1)");
    require(negative_samples > 0, "negative_samples must be > 0");
    require(negative_max_len > 0, "negative_max_len must be > 0");
    require(t_p > 0.0 && t_p < 1.0, "t_p must be in (0, 1)");
    require(m_s >= 1, "m_s must be >= 1");
}

json to_json(const RunConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["lowercase"] = c.lowercase;
    j["encoder_dim"] = c.encoder.dim;
    j["ngram_min"] = c.encoder.ngram_min;
    j["ngram_max"] = c.encoder.ngram_max;
    j["num_buckets"] = c.encoder.num_buckets;
    j["hash_seed"] = c.encoder.hash_seed;
    j["init_scale"] = c.encoder.init_scale;
    j["hidden"] = c.hidden;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma_s"] = c.gamma_s;
    j["noise_sigma"] = c.noise_sigma;
    j["lr"] = c.lr;
    j["embedding_lr_scale"] = c.embedding_lr_scale;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["t_d"] = c.t_d ? json(*c.t_d) : json(nullptr);
    j["t_d_quantile"] = c.t_d_quantile;
    j["negative_samples"] = c.negative_samples;
    j["negative_max_len"] = c.negative_max_len;
    j["frozen_embeddings"] = c.frozen_embeddings ? json(*c.frozen_embeddings) : json(nullptr);
    j["t_p"] = c.t_p;
    j["m_s"] = c.m_s;
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const std::set<std::string> known = {
        "seed",  "lowercase", "encoder_dim", "ngram_min",    "ngram_max",        "num_buckets",
        "hash_seed", "init_scale", "hidden", "alpha",        "beta",             "gamma_s",
        "noise_sigma", "lr", "embedding_lr_scale",     "epochs",   "batch_size",   "t_d",              "t_d_quantile",
        "negative_samples", "negative_max_len", "frozen_embeddings", "t_p", "m_s"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    }

    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (auto it = j.find(key); it != j.end()) {
            try {
                it->get_to(field);
            } catch (const json::exception&) {
                throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
            }
        }
    };
    get("seed", c.seed);
    get("lowercase", c.lowercase);
    get("encoder_dim", c.encoder.dim);
    get("ngram_min", c.encoder.ngram_min);
    get("ngram_max", c.encoder.ngram_max);
    get("num_buckets", c.encoder.num_buckets);
    get("hash_seed", c.encoder.hash_seed);
    get("init_scale", c.encoder.init_scale);
    get("hidden", c.hidden);
    get("alpha", c.alpha);
    get("beta", c.beta);
    get("gamma_s", c.gamma_s);
    get("noise_sigma", c.noise_sigma);
    get("lr", c.lr);
    get("embedding_lr_scale", c.embedding_lr_scale);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("t_d_quantile", c.t_d_quantile);
    get("negative_samples", c.negative_samples);
    get("negative_max_len", c.negative_max_len);
    get("t_p", c.t_p);
    get("m_s", c.m_s);
    if (auto it = j.find("t_d"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) throw std::invalid_argument("config key 't_d' has the wrong type");
        c.t_d = it->get<double>();
    }
    if (auto it = j.find("frozen_embeddings"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw std::invalid_argument("config key 'frozen_embeddings' has the wrong type");
        c.frozen_embeddings = it->get<std::string>();
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void apply_seed_override(RunConfig& config) {
    const char* env = std::getenv("SYNGEN_SEED");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    auto value = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') throw std::invalid_argument("SYNGEN_SEED must be an unsigned integer");
    config.seed = value;
}

}  // namespace syngen
