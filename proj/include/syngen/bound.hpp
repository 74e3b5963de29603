#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "syngen/encoder.hpp"
#include "syngen/scorer.hpp"
#include "syngen/text.hpp"

namespace syngen {

/// Inputs of the synonym generalization bound.
struct BoundInputs {
    double kappa = 0.0;        // Lipschitz constant of the per-entity loss
    double epsilon = 0.0;      // covering radius of the dictionary
    double b = 1.0;            // loss upper bound
    std::size_t s_total = 1;   // |S|, size of the entity domain
    std::size_t s_dict = 1;    // |S^|, dictionary size
    double delta = 0.05;       // failure probability

    void validate() const;
};

struct BoundReport {
    double bound_value = 0.0;
    double term1 = 0.0;  // (kappa * epsilon + b) * sqrt((ln|S| + ln(2/delta)) / 2)
    double term2 = 0.0;  // b * sqrt(ln(2/delta) / (2|S^|))
    BoundInputs inputs;
    /// True when kappa and epsilon are plug-in estimates, not certified values.
    bool estimated = false;
};

/// With probability >= 1 - delta the synonym generalization error is below
/// bound_value = term1 + term2.
BoundReport generalization_bound(const BoundInputs& inputs);

/// Max over held-out vectors of the distance to the nearest dictionary vector.
double epsilon_net_estimate(const std::vector<EmbeddingVector>& dict_embeddings,
                            const std::vector<EmbeddingVector>& heldout_embeddings);

/// Mean of -ln sigmoid(clamp(MLP(E(s)))) over the dictionary.
double empirical_error(const ScorerModel& model, const Dictionary& dict);

nlohmann::json to_json(const BoundReport& report);

}  // namespace syngen
