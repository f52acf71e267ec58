#pragma once

#include "probstab/core.hpp"
#include "probstab/filters.hpp"
#include "probstab/generators.hpp"
#include "probstab/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace probstab {

enum class GradientMode { Analytic, FiniteDifference };

/// Which relaxed objective a PGD run ascends.
enum class AttackObjective {
  Expected,   ///< <K, E(M)^T E(M)>
  WorstCase,  ///< ||E(M)||^2
};

struct AttackConfig {
  std::size_t budget = 1;
  int max_iters = 250;
  double learning_rate = 0.0;  ///< 0 selects 0.1 / ||K|| (0.1 for the worst-case objective)
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::Analytic;
  double fd_step = 1e-5;

  void validate() const;
};

struct AttackResult {
  EdgePerturbation perturbation;
  double objective = 0.0;  ///< exact objective of the extracted perturbation
  std::vector<double> trace;  ///< relaxed objective after each iteration
  int iterations_used = 0;
  bool converged = true;
  RelaxedPerturbation relaxed_final;
};

/// m distinct pairs drawn uniformly without replacement; signs from `g`.
EdgePerturbation random_attack(const Graph& g, std::size_t budget, std::uint64_t seed);

/// A(M) = A + (1 - 2A) * M off the diagonal.
Matrix relaxed_adjacency(const Graph& g, const Matrix& m);

/// f(M) = <K, E(M)^T E(M)> with E(M) = g(A) - g(A(M)).
double relax_and_evaluate(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                          const RelaxedPerturbation& m);

/// ||E(M)||^2.
double relaxed_worst_case(const Graph& g, const FilterSpec& spec, const RelaxedPerturbation& m);

/// Symmetric, zero-diagonal gradient of f at M. Each off-diagonal entry is
/// half the derivative along the symmetric direction e_uv + e_vu, so that
/// <grad, e_uv + e_vu> is the directional derivative.
Matrix gradient(const Graph& g, const FilterSpec& spec, const SecondMoment& k, const Matrix& m,
                GradientMode mode = GradientMode::Analytic, double fd_step = 1e-5);

/// Gradient of ||E(M)||^2 through the leading singular pair.
Matrix worst_case_gradient(const Graph& g, const FilterSpec& spec, const Matrix& m,
                           GradientMode mode = GradientMode::Analytic, double fd_step = 1e-5);

/// Euclidean projection onto {M symmetric, zero diagonal, 0 <= M <= 1, <M, J> <= 2m}.
RelaxedPerturbation project_budget_box(const Matrix& m, std::size_t budget);

/// Projected gradient ascent on the expected perturbation, then top-m extraction.
AttackResult prob_pgd(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                      const AttackConfig& cfg);

/// Same loop on the worst-case objective ||E(M)||^2.
AttackResult wst_pgd(const Graph& g, const FilterSpec& spec, const AttackConfig& cfg);

/// Exact argmax over every size-m perturbation, first in lexicographic order on ties.
/// Throws InstanceTooLarge when C(n(n-1)/2, m) exceeds 2e6.
AttackResult brute_force_attack(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                                std::size_t budget,
                                AttackObjective objective = AttackObjective::Expected);

enum class HeuristicMode { RemarkA, RemarkL };

/// Greedy hub-centred growth scored by the adjacency (RemarkA) or Laplacian
/// (RemarkL) decomposition. RemarkL only joins pairs whose edit type matches
/// every chosen pair at the shared vertex.
EdgePerturbation structural_heuristic(const SecondMoment& k, const Graph& g, std::size_t budget,
                                      HeuristicMode mode);

/// Exact objective of a discrete perturbation.
double attack_objective(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                        const EdgePerturbation& p);

std::string to_string(GradientMode mode);
std::string to_string(HeuristicMode mode);

}  // namespace probstab
