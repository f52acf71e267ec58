#include "probstab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

namespace probstab {

namespace {

void check_vertex(int v, int n) {
  if (v < 0 || v >= n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "vertex " + std::to_string(v) + " not in [0, " + std::to_string(n) + ")");
  }
}

}  // namespace

VertexPair::VertexPair(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

Graph::Graph(Matrix adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw Error(ErrorKind::InvariantViolation, "adjacency matrix must be square");
  }
  const Eigen::Index n = adjacency_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) {
      throw Error(ErrorKind::InvariantViolation, "adjacency diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = adjacency_(i, j);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw Error(ErrorKind::InvariantViolation, "adjacency entries must be finite and >= 0");
      }
      if (a != adjacency_(j, i)) {
        throw Error(ErrorKind::InvariantViolation, "adjacency matrix must be symmetric");
      }
    }
  }
}

Graph Graph::empty(int n) {
  if (n < 0) throw Error(ErrorKind::InvalidParameter, "negative vertex count");
  return Graph(Matrix::Zero(n, n));
}

Graph Graph::from_edges(int n, const std::vector<VertexPair>& edges) {
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    check_vertex(e.u, n);
    check_vertex(e.v, n);
    if (e.u == e.v) throw Error(ErrorKind::InvariantViolation, "self-loop in edge list");
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return Graph(std::move(a));
}

std::vector<VertexPair> Graph::edges() const {
  std::vector<VertexPair> out;
  for (int u = 0; u < n(); ++u) {
    for (int v = u + 1; v < n(); ++v) {
      if (adjacency_(u, v) > 0.0) out.emplace_back(u, v);
    }
  }
  return out;
}

std::size_t Graph::edge_count() const {
  std::size_t count = 0;
  for (int u = 0; u < n(); ++u) {
    for (int v = u + 1; v < n(); ++v) count += adjacency_(u, v) > 0.0 ? 1 : 0;
  }
  return count;
}

EdgePerturbation::EdgePerturbation(std::vector<SignedPair> pairs) : pairs_(std::move(pairs)) {
  std::set<VertexPair> seen;
  for (auto& sp : pairs_) {
    sp.pair = VertexPair(sp.pair.u, sp.pair.v);
    if (sp.pair.u == sp.pair.v) {
      throw Error(ErrorKind::InvariantViolation, "perturbed pair must join distinct vertices");
    }
    if (sp.sign != 1 && sp.sign != -1) {
      throw Error(ErrorKind::InvariantViolation, "perturbation sign must be +1 or -1");
    }
    if (!seen.insert(sp.pair).second) {
      throw Error(ErrorKind::InvariantViolation,
                  "duplicate pair {" + std::to_string(sp.pair.u) + "," +
                      std::to_string(sp.pair.v) + "}");
    }
  }
}

EdgePerturbation EdgePerturbation::flip(const Graph& g, const std::vector<VertexPair>& pairs) {
  std::vector<SignedPair> signed_pairs;
  signed_pairs.reserve(pairs.size());
  for (const auto& p : pairs) {
    check_vertex(p.u, g.n());
    check_vertex(p.v, g.n());
    signed_pairs.push_back({p, g.has_edge(p.u, p.v) ? -1 : 1});
  }
  return EdgePerturbation(std::move(signed_pairs));
}

EdgePerturbation EdgePerturbation::negated() const {
  auto copy = pairs_;
  for (auto& sp : copy) sp.sign = -sp.sign;
  return EdgePerturbation(std::move(copy));
}

void EdgePerturbation::validate(const Graph& g) const {
  for (const auto& sp : pairs_) {
    check_vertex(sp.pair.u, g.n());
    check_vertex(sp.pair.v, g.n());
    const bool present = g.has_edge(sp.pair.u, sp.pair.v);
    if (sp.sign < 0 && !present) {
      throw Error(ErrorKind::SignMismatch, "cannot delete absent edge {" +
                                               std::to_string(sp.pair.u) + "," +
                                               std::to_string(sp.pair.v) + "}");
    }
    if (sp.sign > 0 && present) {
      throw Error(ErrorKind::SignMismatch, "cannot add existing edge {" +
                                               std::to_string(sp.pair.u) + "," +
                                               std::to_string(sp.pair.v) + "}");
    }
  }
}

RelaxedPerturbation::RelaxedPerturbation(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::InvariantViolation, "relaxed perturbation must be square");
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (m_(i, i) != 0.0) {
      throw Error(ErrorKind::InvariantViolation, "relaxed perturbation diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      const double x = m_(i, j);
      if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorKind::InvariantViolation, "relaxed entries must lie in [0, 1]");
      }
      if (x != m_(j, i)) {
        throw Error(ErrorKind::InvariantViolation, "relaxed perturbation must be symmetric");
      }
    }
  }
}

RelaxedPerturbation RelaxedPerturbation::indicator(int n, const EdgePerturbation& p) {
  Matrix m = Matrix::Zero(n, n);
  for (const auto& sp : p.pairs()) {
    check_vertex(sp.pair.u, n);
    check_vertex(sp.pair.v, n);
    m(sp.pair.u, sp.pair.v) = 1.0;
    m(sp.pair.v, sp.pair.u) = 1.0;
  }
  return RelaxedPerturbation(std::move(m));
}

Graph apply_perturbation(const Graph& g, const EdgePerturbation& p) {
  p.validate(g);
  Matrix a = g.adjacency();
  for (const auto& sp : p.pairs()) {
    a(sp.pair.u, sp.pair.v) += sp.sign;
    a(sp.pair.v, sp.pair.u) += sp.sign;
  }
  return Graph(std::move(a));
}

Matrix laplacian(const Matrix& adjacency) {
  Matrix l = -adjacency;
  l.diagonal() = adjacency.rowwise().sum();
  return l;
}

Matrix laplacian(const Graph& g) { return laplacian(g.adjacency()); }

Matrix degree_matrix(const Graph& g, bool self_loops) {
  Vector d = g.adjacency().rowwise().sum();
  if (self_loops) d.array() += 1.0;
  return d.asDiagonal();
}

std::size_t pair_count(int n) {
  return n < 2 ? 0 : static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

std::vector<VertexPair> all_pairs(int n) {
  std::vector<VertexPair> out;
  out.reserve(pair_count(n));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) out.emplace_back(u, v);
  }
  return out;
}

EdgePerturbation perturbation_from_relaxed(const Graph& g, const RelaxedPerturbation& m,
                                           std::size_t budget) {
  const int n = g.n();
  if (m.n() != n) throw Error(ErrorKind::DimensionMismatch, "relaxed matrix size != n");
  if (budget > pair_count(n)) {
    throw Error(ErrorKind::BudgetTooLarge, "budget exceeds the number of vertex pairs");
  }
  auto pairs = all_pairs(n);
  const Matrix& mat = m.matrix();
  std::stable_sort(pairs.begin(), pairs.end(), [&](const VertexPair& a, const VertexPair& b) {
    return mat(a.u, a.v) > mat(b.u, b.v);
  });
  pairs.resize(budget);
  return EdgePerturbation::flip(g, pairs);
}

}  // namespace probstab
