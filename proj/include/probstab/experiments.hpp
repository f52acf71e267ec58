#pragma once

#include "probstab/attacks.hpp"
#include "probstab/filters.hpp"
#include "probstab/generators.hpp"
#include "probstab/serialization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace probstab {

enum class ExperimentKind { FilterAttackComparison, GcnnDepth, RankGap, CsbmCaseStudy };

enum class MomentSource { Empirical, Analytic };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::FilterAttackComparison;
  GraphModelSpec graph{KarateClubModel{}, 0};
  Json signals = Json{{"variant", "gaussian"}};  ///< resolved against the generated graph
  FilterSpec filter = AdjacencyFilter{};
  AttackConfig attack;
  MomentSource moment = MomentSource::Empirical;
  int signal_count = 100;
  int trials = 1;
  int layers = 5;
  std::string activation = "relu";
  int hidden_dim = 0;  ///< 0 keeps the signal width
  int rank_dim = 100;
  std::uint64_t seed = 0;
  std::string output_dir = "results";

  void validate() const;
};

ExperimentSpec experiment_from_json(const Json& j);
Json experiment_to_json(const ExperimentSpec& spec);
std::string to_string(ExperimentKind kind);

/// Writes manifest.json plus CSV tables under spec.output_dir and returns the
/// manifest. Trials run on a worker pool; outputs are merged in trial order.
Json run_experiment(const ExperimentSpec& spec, unsigned workers = 0);

}  // namespace probstab
