#include "syngen/bound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace syngen {

void BoundInputs::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be >= 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be >= 0");
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be > 0");
    if (s_total < 1 || s_dict < 1) throw std::invalid_argument("|S| and |S^| must be >= 1");
    if (s_dict > s_total) throw std::invalid_argument("|S^| cannot exceed |S|");
}

BoundReport generalization_bound(const BoundInputs& in) {
    in.validate();
    const double log_conf = std::log(2.0 / in.delta);
    BoundReport r;
    r.inputs = in;
    r.term1 = (in.kappa * in.epsilon + in.b) * std::sqrt((std::log(static_cast<double>(in.s_total)) + log_conf) / 2.0);
    r.term2 = in.b * std::sqrt(log_conf / (2.0 * static_cast<double>(in.s_dict)));
    r.bound_value = r.term1 + r.term2;
    return r;
}

double epsilon_net_estimate(const std::vector<EmbeddingVector>& dict_embeddings,
                            const std::vector<EmbeddingVector>& heldout_embeddings) {
    if (dict_embeddings.empty() || heldout_embeddings.empty()) {
        throw std::invalid_argument("epsilon_net_estimate: both sets must be non-empty");
    }
    const std::size_t d = dict_embeddings.front().size();
    for (const auto& v : dict_embeddings) {
        if (v.size() != d) throw std::invalid_argument("epsilon_net_estimate: dimension mismatch");
    }
    double worst = 0.0;
    for (const auto& h : heldout_embeddings) {
        if (h.size() != d) throw std::invalid_argument("epsilon_net_estimate: dimension mismatch");
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& v : dict_embeddings) {
            nearest = std::min(nearest, squared_distance(v, h));
            if (nearest == 0.0) break;
        }
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

double empirical_error(const ScorerModel& model, const Dictionary& dict) {
    if (dict.empty()) throw std::invalid_argument("empirical_error: empty dictionary");
    double sum = 0.0;
    for (const auto& e : dict.entries()) {
        auto z = clamp_logit(model.head.logit(model.encoder.encode(model_view(model, e.surface)))).value;
        sum += softplus(-z);
    }
    return sum / static_cast<double>(dict.size());
}

nlohmann::json to_json(const BoundReport& r) {
    const auto& in = r.inputs;
    return nlohmann::json{{"bound_value", r.bound_value},
                          {"term1", r.term1},
                          {"term2", r.term2},
                          {"estimated", r.estimated},
                          {"inputs",
                           {{"kappa", in.kappa},
                            {"epsilon", in.epsilon},
                            {"b", in.b},
                            {"s_total", in.s_total},
                            {"s_dict", in.s_dict},
                            {"delta", in.delta}}}};
}

}  // namespace syngen
