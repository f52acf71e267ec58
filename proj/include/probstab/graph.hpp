#pragma once

#include "probstab/core.hpp"

#include <compare>
#include <cstddef>
#include <vector>

namespace probstab {

/// Unordered vertex pair, stored with u < v.
struct VertexPair {
  int u = 0;
  int v = 0;

  VertexPair() = default;
  VertexPair(int a, int b);

  auto operator<=>(const VertexPair&) const = default;
};

/// A perturbed pair together with its edit type: +1 adds an edge, -1 deletes one.
struct SignedPair {
  VertexPair pair;
  int sign = 1;

  bool operator==(const SignedPair&) const = default;
};

/// Undirected simple (or nonnegatively weighted) graph on a fixed vertex set.
/// The adjacency matrix is symmetric, nonnegative, and has a zero diagonal.
class Graph {
 public:
  Graph() = default;
  explicit Graph(Matrix adjacency);

  static Graph empty(int n);
  static Graph from_edges(int n, const std::vector<VertexPair>& edges);

  int n() const { return static_cast<int>(adjacency_.rows()); }
  const Matrix& adjacency() const { return adjacency_; }
  bool has_edge(int u, int v) const { return adjacency_(u, v) > 0.0; }

  /// Edges with nonzero weight, lexicographic by (u, v).
  std::vector<VertexPair> edges() const;
  std::size_t edge_count() const;

 private:
  Matrix adjacency_;
};

class EdgePerturbation {
 public:
  EdgePerturbation() = default;
  /// Rejects self pairs, duplicates, and signs other than +1/-1.
  explicit EdgePerturbation(std::vector<SignedPair> pairs);

  /// Signs derived from the graph: existing edges are deleted, others added.
  static EdgePerturbation flip(const Graph& g, const std::vector<VertexPair>& pairs);

  const std::vector<SignedPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  /// Same pairs with every sign negated.
  EdgePerturbation negated() const;

  /// Throws SignMismatch / IndexOutOfRange when the perturbation does not fit `g`.
  void validate(const Graph& g) const;

 private:
  std::vector<SignedPair> pairs_;
};

/// Symmetric [0,1]-valued relaxation of a perturbation indicator, zero diagonal.
class RelaxedPerturbation {
 public:
  RelaxedPerturbation() = default;
  explicit RelaxedPerturbation(Matrix m);

  const Matrix& matrix() const { return m_; }
  int n() const { return static_cast<int>(m_.rows()); }

  /// Indicator matrix of the given perturbation.
  static RelaxedPerturbation indicator(int n, const EdgePerturbation& p);

 private:
  Matrix m_;
};

Graph apply_perturbation(const Graph& g, const EdgePerturbation& p);

/// L = D - A.
Matrix laplacian(const Graph& g);
Matrix laplacian(const Matrix& adjacency);

Matrix degree_matrix(const Graph& g, bool self_loops);

/// The m pairs with the largest relaxed values (ties broken lexicographically),
/// signed against the current adjacency.
EdgePerturbation perturbation_from_relaxed(const Graph& g, const RelaxedPerturbation& m,
                                           std::size_t budget);

/// n(n-1)/2.
std::size_t pair_count(int n);

/// All pairs u < v in lexicographic order.
std::vector<VertexPair> all_pairs(int n);

}  // namespace probstab
