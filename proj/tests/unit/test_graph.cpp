#include "support.hpp"

#include "probstab/graph.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>

using namespace probstab;
using namespace testing;

namespace {

Graph worked_example() {
  return Graph::from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
}

// Rebuilds the perturbed adjacency from an explicit edge set.
Matrix rebuild_from_edge_set(const Graph& g, const EdgePerturbation& p) {
  std::set<VertexPair> edges;
  for (const auto& e : g.edges()) edges.insert(e);
  for (const auto& sp : p.pairs()) {
    if (sp.sign > 0) {
      edges.insert(sp.pair);
    } else {
      edges.erase(sp.pair);
    }
  }
  Matrix a = Matrix::Zero(g.n(), g.n());
  for (const auto& e : edges) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

}  // namespace

TEST_CASE("graph invariants are enforced") {
  Matrix asym = Matrix::Zero(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(Graph{asym}, Error);
  Matrix loop = Matrix::Zero(3, 3);
  loop(1, 1) = 1.0;
  CHECK_THROWS_AS(Graph{loop}, Error);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 1) = negative(1, 0) = -1.0;
  CHECK_THROWS_AS(Graph{negative}, Error);
}

TEST_CASE("apply_perturbation on the worked example") {
  const Graph g = worked_example();
  const EdgePerturbation p({{VertexPair(2, 4), 1}, {VertexPair(3, 5), -1}});
  const Graph gp = apply_perturbation(g, p);
  CHECK(gp.has_edge(2, 4));
  CHECK_FALSE(gp.has_edge(3, 5));
  CHECK(gp.edge_count() == g.edge_count());
}

TEST_CASE("apply_perturbation with an empty set is the identity") {
  const Graph g = worked_example();
  CHECK(apply_perturbation(g, EdgePerturbation{}).adjacency() == g.adjacency());
}

TEST_CASE("apply_perturbation matches an edge-set rebuild") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = erdos_renyi(10, 0.3, rng);
    const EdgePerturbation p = random_perturbation(g, 3, rng);
    CHECK(apply_perturbation(g, p).adjacency() == rebuild_from_edge_set(g, p));
  }
}

TEST_CASE("sign and index errors") {
  const Graph g = worked_example();
  try {
    apply_perturbation(g, EdgePerturbation({{VertexPair(0, 1), 1}}));
    FAIL("adding an existing edge must throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SignMismatch);
  }
  try {
    apply_perturbation(g, EdgePerturbation({{VertexPair(0, 5), -1}}));
    FAIL("deleting an absent edge must throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SignMismatch);
  }
  try {
    apply_perturbation(g, EdgePerturbation({{VertexPair(0, 9), 1}}));
    FAIL("out-of-range vertex must throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IndexOutOfRange);
  }
  CHECK_THROWS_AS(EdgePerturbation({{VertexPair(1, 2), 1}, {VertexPair(2, 1), 1}}), Error);
  CHECK_THROWS_AS(EdgePerturbation({{VertexPair(1, 2), 2}}), Error);
  CHECK_THROWS_AS(EdgePerturbation({{VertexPair(3, 3), 1}}), Error);
}

TEST_CASE("perturbation followed by its negation restores the graph") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = erdos_renyi(12, 0.25, rng);
    const EdgePerturbation p = random_perturbation(g, 6, rng);
    const Graph back = apply_perturbation(apply_perturbation(g, p), p.negated());
    CHECK(back.adjacency() == g.adjacency());
  }
}

TEST_CASE("laplacian basics") {
  CHECK(laplacian(Graph::empty(4)).isZero(0.0));
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(laplacian(Graph::from_edges(2, {{0, 1}})) == expected);
}

TEST_CASE("laplacian rows sum to zero and it is PSD") {
  SplitMix64 rng(9);
  const Graph g = erdos_renyi(30, 0.2, rng);
  const Matrix l = laplacian(g);
  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  for (int i = 0; i < 100; ++i) {
    Vector x = gaussian_matrix(30, 1, rng);
    x.normalize();
    CHECK(x.dot(l * x) >= -1e-12);
  }
}

TEST_CASE("degree matrix") {
  CHECK(degree_matrix(Graph::empty(3), false).isZero(0.0));
  CHECK(degree_matrix(Graph::empty(3), true) == Matrix::Identity(3, 3));
  SplitMix64 rng(2);
  const Graph g = erdos_renyi(15, 0.3, rng);
  CHECK(degree_matrix(g, false).trace() == doctest::Approx(2.0 * g.edge_count()));
  CHECK(degree_matrix(g, true).trace() == doctest::Approx(2.0 * g.edge_count() + 15));
}

TEST_CASE("perturbation_from_relaxed tie-break and selection") {
  const Graph g = Graph::from_edges(4, {{0, 1}});
  const auto zero = perturbation_from_relaxed(g, RelaxedPerturbation(Matrix::Zero(4, 4)), 2);
  REQUIRE(zero.size() == 2);
  CHECK(zero.pairs()[0].pair == VertexPair(0, 1));
  CHECK(zero.pairs()[0].sign == -1);
  CHECK(zero.pairs()[1].pair == VertexPair(0, 2));
  CHECK(zero.pairs()[1].sign == 1);

  Matrix m = Matrix::Zero(4, 4);
  m(1, 3) = m(3, 1) = 0.4;
  m(2, 3) = m(3, 2) = 0.9;
  const auto two = perturbation_from_relaxed(g, RelaxedPerturbation(m), 2);
  std::set<VertexPair> chosen;
  for (const auto& sp : two.pairs()) chosen.insert(sp.pair);
  CHECK(chosen == std::set<VertexPair>{{1, 3}, {2, 3}});

  CHECK_THROWS_AS(perturbation_from_relaxed(g, RelaxedPerturbation(m), 7), Error);
}

TEST_CASE("perturbation_from_relaxed matches a full sort") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = erdos_renyi(9, 0.3, rng);
    Matrix m = Matrix::Zero(9, 9);
    for (int u = 0; u < 9; ++u) {
      for (int v = u + 1; v < 9; ++v) m(u, v) = m(v, u) = rng.uniform();
    }
    std::vector<std::pair<double, VertexPair>> entries;
    for (const auto& p : all_pairs(9)) entries.push_back({m(p.u, p.v), p});
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    const auto picked = perturbation_from_relaxed(g, RelaxedPerturbation(m), 5);
    REQUIRE(picked.size() == 5);
    std::set<VertexPair> expected, got;
    for (int i = 0; i < 5; ++i) expected.insert(entries[static_cast<std::size_t>(i)].second);
    for (const auto& sp : picked.pairs()) {
      got.insert(sp.pair);
      CHECK(sp.sign == (g.has_edge(sp.pair.u, sp.pair.v) ? -1 : 1));
    }
    CHECK(got == expected);
    picked.validate(g);
  }
}

TEST_CASE("relaxed perturbation invariants") {
  Matrix bad = Matrix::Zero(3, 3);
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_THROWS_AS(RelaxedPerturbation{bad}, Error);
  Matrix asym = Matrix::Zero(3, 3);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(RelaxedPerturbation{asym}, Error);
}
