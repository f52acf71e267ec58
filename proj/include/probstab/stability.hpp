#pragma once

#include "probstab/core.hpp"
#include "probstab/filters.hpp"
#include "probstab/gcnn.hpp"
#include "probstab/generators.hpp"
#include "probstab/graph.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace probstab {

/// <K, E^T E> = tr(E K E^T).
double expected_perturbation(const SecondMoment& k, const Matrix& e);
double expected_perturbation(const SecondMoment& k, const FilterPerturbation& e);

struct TailBound {
  double threshold = 0.0;  ///< (1 + c) * expected
  double probability = 0.0;  ///< 1 / (1 + c)
};

/// P(||E x||^2 >= (1 + c) E||E x||^2) <= 1 / (1 + c).
TailBound markov_tail(double expected, double c);

/// d * C_sigma^2 * ||Theta||^2 * <K, E^T E>.
double single_layer_bound(const SecondMoment& k, const Matrix& e, const Matrix& theta,
                          double lipschitz, int d);

/// d * C_sigma^{2L} * C^{2L-2} * prod ||Theta_j||^2 * ((L-1) ||E||^2 tr K + <K, E^T E>).
/// C_sigma is the largest Lipschitz constant over the layers. Throws
/// AssumptionViolated if a hidden activation does not fix zero or if
/// `filter_norm` is below `measured_filter_norm`.
double multilayer_bound(const SecondMoment& k, const Matrix& e, const GcnnModel& model,
                        double filter_norm, int d, double measured_filter_norm = 0.0);

struct Decomposition {
  double self_term = 0.0;
  double coupling_term = 0.0;
  double total = 0.0;
};

/// Adjacency filter: sum over P of (K_uu + K_vv) plus, for every unordered
/// pair of perturbed edges sharing a vertex, 2 sigma sigma' K_vv' where v, v'
/// are the endpoints not shared.
Decomposition adjacency_decomposition(const SecondMoment& k, const Graph& g,
                                      const EdgePerturbation& p);

/// Laplacian filter: 2 sum R(u,v) plus, for every unordered pair of perturbed
/// edges sharing vertex u, sigma sigma' (R(u,v) + R(u,v') - R(v,v')).
Decomposition laplacian_decomposition(const SecondMoment& k, const Graph& g,
                                      const EdgePerturbation& p);

/// R(u,v) = K_uu + K_vv - 2 K_uv = E[(x_u - x_v)^2].
double pair_distance(const SecondMoment& k, int u, int v);

/// ||E x_i||^2 for every column.
std::vector<double> per_sample_perturbations(const Matrix& e, const Matrix& signals);

struct StabilityReport {
  double expected = 0.0;
  double worst_case = 0.0;      ///< ||E||^2
  double uniform_sphere = 0.0;  ///< ||E||_F^2 / n
  std::optional<std::vector<double>> per_sample;
};

StabilityReport stability_report(const SecondMoment& k, const Matrix& e, int n,
                                 const std::optional<Matrix>& signals = std::nullopt);

/// Zero-mean Gaussian signals with covariance K, drawn in fixed-size batches
/// from independent sub-streams. Returns every ||E x||^2 in sample order.
std::vector<double> monte_carlo_perturbations(const SecondMoment& k, const Matrix& e,
                                              std::size_t samples, std::uint64_t seed,
                                              std::size_t batch = 4096);

/// Pairwise (tree) sum, independent of thread count.
double pairwise_sum(const std::vector<double>& values);

}  // namespace probstab
