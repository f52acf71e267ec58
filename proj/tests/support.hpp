#pragma once

#include "probstab/core.hpp"
#include "probstab/generators.hpp"
#include "probstab/graph.hpp"
#include "probstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace testing {

using probstab::EdgePerturbation;
using probstab::Graph;
using probstab::Matrix;
using probstab::SecondMoment;
using probstab::SplitMix64;
using probstab::Vector;
using probstab::VertexPair;

inline Matrix gaussian_matrix(int rows, int cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Matrix random_psd(int n, SplitMix64& rng) {
  const Matrix b = gaussian_matrix(n, n, rng);
  return b * b.transpose() / n;
}

inline SecondMoment random_moment(int n, SplitMix64& rng) { return SecondMoment(random_psd(n, rng)); }

inline Graph erdos_renyi(int n, double p, SplitMix64& rng) {
  std::vector<VertexPair> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

inline std::vector<VertexPair> random_pairs(int n, std::size_t count, SplitMix64& rng) {
  std::vector<VertexPair> pairs = probstab::all_pairs(n);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pairs[i], pairs[i + rng.below(pairs.size() - i)]);
  }
  pairs.resize(count);
  return pairs;
}

inline EdgePerturbation random_perturbation(const Graph& g, std::size_t count, SplitMix64& rng) {
  return EdgePerturbation::flip(g, random_pairs(g.n(), count, rng));
}

/// Hub-centred perturbation: `count` pairs all touching `hub`.
inline EdgePerturbation star_perturbation(const Graph& g, int hub, std::size_t count) {
  std::vector<VertexPair> pairs;
  for (int v = 0; v < g.n() && pairs.size() < count; ++v) {
    if (v != hub) pairs.emplace_back(hub, v);
  }
  return EdgePerturbation::flip(g, pairs);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// max |a - b| / max |b|.
inline double relative_max_error(const Matrix& a, const Matrix& b) {
  const double scale = std::max(max_abs(b), 1e-300);
  return max_abs(a - b) / scale;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Projection oracle: the clipped mass is piecewise linear in the shift, so
// solve exactly between consecutive breakpoints.
inline Matrix projection_oracle(const Matrix& input, double budget) {
  Matrix s = 0.5 * (input + input.transpose());
  s.diagonal().setZero();
  const Matrix clipped = s.cwiseMax(0.0).cwiseMin(1.0);
  if (clipped.sum() <= 2.0 * budget) return clipped;
  std::vector<double> values;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (i != j) values.push_back(s(i, j));
    }
  }
  std::vector<double> breaks{0.0};
  for (double x : values) {
    breaks.push_back(x);
    breaks.push_back(x - 1.0);
  }
  std::sort(breaks.begin(), breaks.end());
  auto mass = [&](double mu) {
    double t = 0.0;
    for (double x : values) t += std::clamp(x - mu, 0.0, 1.0);
    return t;
  };
  const double target = 2.0 * budget;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (hi <= 0.0) continue;
    const double a = std::max(lo, 0.0);
    const double ma = mass(a), mb = mass(hi);
    if (ma >= target && mb <= target && ma > mb) {
      const double mu = a + (ma - target) / (ma - mb) * (hi - a);
      Matrix out = (s.array() - mu).cwiseMax(0.0).cwiseMin(1.0).matrix();
      out.diagonal().setZero();
      return out;
    }
  }
  return clipped;
}

}  // namespace testing
