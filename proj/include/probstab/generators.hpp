#pragma once

#include "probstab/core.hpp"
#include "probstab/graph.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace probstab {

// ---------------------------------------------------------------------------
// Graph models
// ---------------------------------------------------------------------------

struct SbmModel {
  std::vector<int> block_sizes;
  double p_in = 0.4;
  double p_out = 0.05;
};

/// Preferential attachment grown from a complete graph on `attach` vertices.
struct BarabasiAlbertModel {
  int n = 50;
  int attach = 3;
};

/// Ring lattice of even degree k, each edge rewired with probability beta.
struct WattsStrogatzModel {
  int n = 50;
  int k = 4;
  double beta = 0.2;
};

/// Random geometric graph: uniform points in the unit square joined when
/// their Euclidean distance is below `radius`.
struct SensorModel {
  int n = 50;
  double radius = 0.4;
};

/// Zachary's 34-member karate club network.
struct KarateClubModel {};

using GraphModel =
    std::variant<SbmModel, BarabasiAlbertModel, WattsStrogatzModel, SensorModel, KarateClubModel>;

struct GraphModelSpec {
  GraphModel model;
  std::uint64_t seed = 0;
};

void validate(const GraphModelSpec& spec);

/// Deterministic for a fixed seed.
Graph generate_graph(const GraphModelSpec& spec);

Graph karate_club();

/// Membership vector of consecutive blocks: +1 for block 0, -1 otherwise.
std::vector<int> two_block_membership(const std::vector<int>& block_sizes);

// ---------------------------------------------------------------------------
// Signal models
// ---------------------------------------------------------------------------

/// Contextual SBM: x = sqrt(mu / n) * u * v + z, z standard normal.
/// The latent u is a fixed scalar.
struct CsbmSignals {
  std::vector<int> membership;
  double mu = 1.0;
  double u = 1.0;
};

/// Smooth signals: N(mean * 1, L^+ + noise^2 I).
struct SmoothSignals {
  Graph graph;
  double mean = 0.0;
  double noise = 0.1;
};

struct IsotropicGaussianSignals {
  int n = 1;
};

/// Uniform on the unit sphere in R^n.
struct UnitSphereSignals {
  int n = 1;
};

using SignalModel =
    std::variant<CsbmSignals, SmoothSignals, IsotropicGaussianSignals, UnitSphereSignals>;

struct SignalModelSpec {
  SignalModel model;
  std::uint64_t seed = 0;
};

void validate(const SignalModelSpec& spec);

int signal_dimension(const SignalModelSpec& spec);

/// n x d matrix of i.i.d. columns.
Matrix sample_signals(const SignalModelSpec& spec, int d);

// ---------------------------------------------------------------------------
// Second moments
// ---------------------------------------------------------------------------

/// K = E[x x^T]; symmetric positive semidefinite.
class SecondMoment {
 public:
  SecondMoment() = default;
  /// Validates symmetry and PSD (smallest eigenvalue >= -1e-9 ||K||).
  explicit SecondMoment(Matrix k);

  const Matrix& matrix() const { return k_; }
  int n() const { return static_cast<int>(k_.rows()); }
  double trace() const { return k_.trace(); }

  SecondMoment scaled(double c) const;

 private:
  Matrix k_;
};

/// (1/d) X X^T.
SecondMoment empirical_second_moment(const Matrix& signals);

/// Closed form for the cSBM and smooth models; UnsupportedVariant otherwise.
SecondMoment analytic_second_moment(const SignalModelSpec& spec);

/// L^+ with eigenvalues below 1e-10 lambda_max treated as zero.
Matrix laplacian_pinv(const Graph& g);

}  // namespace probstab
