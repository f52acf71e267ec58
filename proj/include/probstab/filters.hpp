#pragma once

#include "probstab/core.hpp"
#include "probstab/graph.hpp"

#include <string>
#include <variant>
#include <vector>

namespace probstab {

struct AdjacencyFilter {};
struct LaplacianFilter {};
/// D~^{-1/2} (A + I) D~^{-1/2}.
struct NormalizedAdjacencyFilter {};
/// k-th power of the self-loop normalized adjacency.
struct SgcPowerFilter {
  int k = 1;
};
/// sum_j c_j A^j.
struct PolynomialAdjacencyFilter {
  std::vector<double> coeffs;
};
/// sum_j c_j L^j.
struct PolynomialLaplacianFilter {
  std::vector<double> coeffs;
};
/// (I + alpha L)^{-1}.
struct LowPassFilter {
  double alpha = 1.0;
};
/// exp(-tau L).
struct HeatDiffusionFilter {
  double tau = 1.0;
};
/// (1 + eps) I + A.
struct GinConvFilter {
  double eps = 0.0;
};

using FilterSpec =
    std::variant<AdjacencyFilter, LaplacianFilter, NormalizedAdjacencyFilter, SgcPowerFilter,
                 PolynomialAdjacencyFilter, PolynomialLaplacianFilter, LowPassFilter,
                 HeatDiffusionFilter, GinConvFilter>;

/// Throws InvalidParameter on k < 1, alpha/tau <= 0, or empty coefficients.
void validate(const FilterSpec& spec);

/// Stable lower-case identifier ("adjacency", "laplacian", ...).
std::string filter_name(const FilterSpec& spec);

/// g(S) for a graph.
Matrix build_filter(const FilterSpec& spec, const Graph& g);

/// g(S) for an arbitrary symmetric nonnegative adjacency (used by the
/// continuous relaxation, where entries lie in [0, 1]).
Matrix build_filter(const FilterSpec& spec, const Matrix& adjacency);

/// g(S) X. The low-pass filter solves (I + alpha L) Y = X instead of inverting.
Matrix apply_filter(const FilterSpec& spec, const Graph& g, const Matrix& signals);

struct FilterPerturbation {
  Matrix E;  ///< g(S) - g(S_p)
  FilterSpec spec;
  EdgePerturbation pert;
};

FilterPerturbation filter_perturbation(const FilterSpec& spec, const Graph& g,
                                       const EdgePerturbation& p);

/// max(||g(S)||, ||g(S_p)||): the smallest admissible filter-norm constant C.
double filter_norm_bound(const FilterSpec& spec, const Graph& g, const EdgePerturbation& p);

}  // namespace probstab
