#pragma once

#include "probstab/core.hpp"
#include "probstab/filters.hpp"
#include "probstab/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace probstab {

enum class ActivationKind { ReLU, Sigmoid, Tanh, LeakyReLU, Identity };

struct Activation {
  ActivationKind kind = ActivationKind::ReLU;
  double slope = 0.01;  ///< LeakyReLU only

  /// Lipschitz constant C_sigma.
  double lipschitz() const;
  /// sigma(0) == 0.
  bool zero_preserving() const;
  Matrix apply(const Matrix& z) const;
  std::string name() const;

  static Activation parse(const std::string& name, double slope = 0.01);
};

struct GcnnLayer {
  Matrix weights;  ///< d_{l-1} x d_l
  Activation activation;
  std::optional<double> gin_eps;  ///< per-layer epsilon for GIN layers
};

/// X^(l) = sigma^(l)(g(S) X^(l-1) Theta^(l)), weights frozen.
struct GcnnModel {
  FilterSpec filter;
  std::vector<GcnnLayer> layers;
  std::uint64_t seed = 0;

  int depth() const { return static_cast<int>(layers.size()); }
  int input_dim() const;
  /// Throws InvalidDims unless L >= 1 and consecutive dimensions chain.
  void validate() const;
};

/// Layer outputs X^(0) = X, X^(1), ..., X^(L).
std::vector<Matrix> forward(const GcnnModel& model, const Graph& g, const Matrix& signals);

/// ||X^(l) - X_p^(l)||_F^2 for l = 1..L.
std::vector<double> layerwise_perturbation(const GcnnModel& model, const Graph& g,
                                           const EdgePerturbation& p, const Matrix& signals);

/// Standard-normal weights; dims = (d_0, d_1, ..., d_L).
GcnnModel random_model(const FilterSpec& filter, const std::vector<int>& dims,
                       const Activation& activation, std::uint64_t seed);

/// Writes `<stem>.json` plus `<stem>.layer<l>.csv` weight blocks.
void save_model(const GcnnModel& model, const std::string& stem);
GcnnModel load_model(const std::string& json_path);

}  // namespace probstab
