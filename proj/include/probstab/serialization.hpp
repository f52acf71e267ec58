#pragma once

#include "probstab/attacks.hpp"
#include "probstab/filters.hpp"
#include "probstab/generators.hpp"
#include "probstab/graph.hpp"
#include "probstab/stability.hpp"

#include <json.hpp>

#include <optional>

namespace probstab {

using Json = nlohmann::ordered_json;

// {"variant": "sgc", "k": 2}, {"variant": "polynomial_adjacency", "coeffs": [...]}, ...
Json filter_to_json(const FilterSpec& spec);
FilterSpec filter_from_json(const Json& j);

// {"variant": "sbm", "block_sizes": [20, 20], "p_in": 0.4, "p_out": 0.05, "seed": 7}
Json graph_model_to_json(const GraphModelSpec& spec);
GraphModelSpec graph_model_from_json(const Json& j);

// {"variant": "csbm", "block_sizes": [50, 50] | "membership": [...], "mu": 1, "u": 1}
// {"variant": "smooth", "mean": 0, "noise": 0.1}   (graph supplied by the caller)
// {"variant": "gaussian", "n": 10} / {"variant": "unit_sphere", "n": 10}
SignalModelSpec signal_model_from_json(const Json& j, const std::optional<Graph>& graph);
Json signal_model_to_json(const SignalModelSpec& spec);

Json perturbation_to_json(const EdgePerturbation& p);
EdgePerturbation perturbation_from_json(const Json& j);

AttackConfig attack_config_from_json(const Json& j);
Json attack_config_to_json(const AttackConfig& cfg);

/// Perturbation as a signed pair list plus objective and run metadata.
Json attack_result_to_json(const AttackResult& r);

Json report_to_json(const StabilityReport& r);

}  // namespace probstab
