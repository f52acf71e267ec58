#include "support.hpp"

#include "probstab/filters.hpp"
#include "probstab/gcnn.hpp"
#include "probstab/linalg.hpp"
#include "probstab/stability.hpp"

#include <doctest.h>

#include <filesystem>

using namespace probstab;
using namespace testing;

namespace {

Graph path(int n) {
  std::vector<VertexPair> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

GcnnModel identity_model(const FilterSpec& filter, int d) {
  GcnnModel m;
  m.filter = filter;
  m.layers.push_back({Matrix::Identity(d, d), Activation{ActivationKind::Identity}, std::nullopt});
  return m;
}

// Straight-line recursion with explicit loops.
Matrix relu_two_layer(const Matrix& s, const Matrix& x, const Matrix& w1, const Matrix& w2) {
  auto layer = [&](const Matrix& in, const Matrix& w) {
    Matrix out = Matrix::Zero(s.rows(), w.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
          for (Eigen::Index k = 0; k < w.rows(); ++k) acc += s(i, j) * in(j, k) * w(k, c);
        }
        out(i, c) = acc > 0.0 ? acc : 0.0;
      }
    }
    return out;
  };
  return layer(layer(x, w1), w2);
}

}  // namespace

TEST_CASE("single identity layer applies the filter") {
  SplitMix64 rng(1);
  const Graph g = erdos_renyi(7, 0.4, rng);
  const Matrix x = gaussian_matrix(7, 3, rng);
  const auto out = forward(identity_model(LaplacianFilter{}, 3), g, x);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == x);
  CHECK(out[1] == build_filter(LaplacianFilter{}, g) * x);
}

TEST_CASE("zero input stays zero through zero-preserving layers") {
  const Graph g = path(5);
  for (const auto kind : {ActivationKind::ReLU, ActivationKind::Tanh, ActivationKind::LeakyReLU,
                          ActivationKind::Identity}) {
    const GcnnModel m = random_model(NormalizedAdjacencyFilter{}, {3, 4, 2}, Activation{kind}, 5);
    for (const auto& layer : forward(m, g, Matrix::Zero(5, 3))) CHECK(layer.isZero(0.0));
  }
}

TEST_CASE("two-layer relu network matches a loop implementation") {
  const Graph g = path(5);
  const GcnnModel m = random_model(NormalizedAdjacencyFilter{}, {3, 4, 2}, Activation{}, 11);
  SplitMix64 rng(2);
  const Matrix x = gaussian_matrix(5, 3, rng);
  const Matrix s = build_filter(NormalizedAdjacencyFilter{}, g);
  const Matrix oracle = relu_two_layer(s, x, m.layers[0].weights, m.layers[1].weights);
  CHECK(max_abs(forward(m, g, x).back() - oracle) < 1e-12);
}

TEST_CASE("dimension errors") {
  const Graph g = path(4);
  const GcnnModel m = random_model(AdjacencyFilter{}, {3, 2}, Activation{}, 0);
  CHECK_THROWS_AS(forward(m, g, Matrix::Zero(4, 2)), Error);
  CHECK_THROWS_AS(forward(m, g, Matrix::Zero(5, 3)), Error);
  CHECK_THROWS_AS(random_model(AdjacencyFilter{}, {3}, Activation{}, 0), Error);
  GcnnModel broken = m;
  broken.layers.push_back({Matrix::Zero(5, 1), Activation{}, std::nullopt});
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("layerwise perturbation basics") {
  SplitMix64 rng(3);
  const Graph g = erdos_renyi(9, 0.3, rng);
  const Matrix x = gaussian_matrix(9, 2, rng);
  const GcnnModel deep = random_model(AdjacencyFilter{}, {2, 3, 3}, Activation{}, 2);
  for (double v : layerwise_perturbation(deep, g, EdgePerturbation{}, x)) CHECK(v == 0.0);

  const EdgePerturbation p = random_perturbation(g, 3, rng);
  const auto single = layerwise_perturbation(identity_model(LaplacianFilter{}, 2), g, p, x);
  const Matrix e = filter_perturbation(LaplacianFilter{}, g, p).E;
  CHECK(single[0] == doctest::Approx((e * x).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("random model determinism, shapes and moments") {
  const auto a = random_model(AdjacencyFilter{}, {5, 5}, Activation{}, 42);
  const auto b = random_model(AdjacencyFilter{}, {5, 5}, Activation{}, 42);
  CHECK(a.layers[0].weights == b.layers[0].weights);
  const auto shaped = random_model(AdjacencyFilter{}, {3, 4, 5}, Activation{}, 1);
  CHECK(shaped.layers[0].weights.rows() == 3);
  CHECK(shaped.layers[0].weights.cols() == 4);
  CHECK(shaped.layers[1].weights.rows() == 4);
  CHECK(shaped.layers[1].weights.cols() == 5);

  const auto big = random_model(AdjacencyFilter{}, {100, 100}, Activation{}, 7);
  const Matrix& w = big.layers[0].weights;
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / (w.size() - 1);
  CHECK(std::abs(mean) < 3.0 / 100.0);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("activation constants") {
  CHECK(Activation{ActivationKind::ReLU}.lipschitz() == 1.0);
  CHECK(Activation{ActivationKind::Sigmoid}.lipschitz() == 0.25);
  CHECK(Activation{ActivationKind::LeakyReLU, 0.2}.lipschitz() == 1.0);
  CHECK(Activation{ActivationKind::LeakyReLU, 3.0}.lipschitz() == 3.0);
  CHECK_FALSE(Activation{ActivationKind::Sigmoid}.zero_preserving());
  for (const auto kind : {ActivationKind::ReLU, ActivationKind::Sigmoid, ActivationKind::Tanh,
                          ActivationKind::LeakyReLU, ActivationKind::Identity}) {
    const Activation act{kind, 0.3};
    const double at_zero = act.apply(Matrix::Zero(1, 1))(0, 0);
    CHECK(act.zero_preserving() == (at_zero == 0.0));
    CHECK(Activation::parse(act.name(), 0.3).kind == kind);
  }
  CHECK_THROWS_AS(Activation::parse("softmax"), Error);
}

TEST_CASE("activations respect their Lipschitz constants") {
  SplitMix64 rng(8);
  for (const auto kind : {ActivationKind::ReLU, ActivationKind::Sigmoid, ActivationKind::Tanh,
                          ActivationKind::LeakyReLU, ActivationKind::Identity}) {
    for (const double slope : {0.01, 2.5}) {
      const Activation act{kind, slope};
      for (int trial = 0; trial < 50; ++trial) {
        const Matrix x = 3.0 * gaussian_matrix(6, 4, rng);
        const Matrix y = 3.0 * gaussian_matrix(6, 4, rng);
        CHECK((act.apply(x) - act.apply(y)).norm() <= act.lipschitz() * (x - y).norm() * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("model save and load round-trip exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "probstab_gcnn_roundtrip";
  std::filesystem::create_directories(dir);
  GcnnModel m = random_model(SgcPowerFilter{2}, {3, 4, 2}, Activation{ActivationKind::LeakyReLU, 0.2}, 9);
  m.layers[1].gin_eps = 0.5;
  save_model(m, (dir / "model").string());
  const GcnnModel back = load_model((dir / "model.json").string());
  REQUIRE(back.depth() == 2);
  CHECK(back.seed == 9);
  CHECK(filter_name(back.filter) == "sgc");
  CHECK(std::get<SgcPowerFilter>(back.filter).k == 2);
  for (int l = 0; l < 2; ++l) {
    CHECK(back.layers[l].weights == m.layers[l].weights);
    CHECK(back.layers[l].activation.kind == ActivationKind::LeakyReLU);
    CHECK(back.layers[l].activation.slope == 0.2);
  }
  CHECK(back.layers[1].gin_eps == 0.5);
  std::filesystem::remove_all(dir);
}

TEST_CASE("single-layer identity network recovers the expected perturbation") {
  SplitMix64 rng(12);
  const Graph g = generate_graph({SbmModel{{10, 10}, 0.4, 0.05}, 3});
  const SecondMoment k = random_moment(20, rng);
  const EdgePerturbation p = random_perturbation(g, 5, rng);
  const Matrix e = filter_perturbation(AdjacencyFilter{}, g, p).E;
  const Matrix root = psd_sqrt(k.matrix());
  const int batch = 100;
  const GcnnModel m = identity_model(AdjacencyFilter{}, batch);
  double total = 0.0;
  for (int b = 0; b < 1000; ++b) {
    const Matrix x = root * gaussian_matrix(20, batch, rng);
    total += layerwise_perturbation(m, g, p, x)[0];
  }
  const double estimate = total / 100000.0;
  CHECK(relative_error(estimate, expected_perturbation(k, e)) < 0.02);
}

TEST_CASE("relu single layer preserves the argmax of the expected perturbation") {
  SplitMix64 rng(21);
  const int n = 12;
  const Graph g = erdos_renyi(n, 0.3, rng);
  Matrix km = random_psd(n, rng);
  km(3, 3) += 2.0;
  km(7, 7) += 1.5;
  const SecondMoment k(km);
  const Matrix root = psd_sqrt(km);
  const Matrix x = root * gaussian_matrix(n, 100000, rng);
  const Matrix base = build_filter(AdjacencyFilter{}, g);
  std::size_t best_exact = 0, best_relu = 0;
  double top_exact = -1.0, top_relu = -1.0;
  const auto pairs = all_pairs(n);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const EdgePerturbation p = EdgePerturbation::flip(g, {pairs[i]});
    const Matrix e = filter_perturbation(AdjacencyFilter{}, g, p).E;
    const double exact = expected_perturbation(k, e);
    const Matrix perturbed = build_filter(AdjacencyFilter{}, apply_perturbation(g, p));
    const double relu =
        ((base * x).cwiseMax(0.0) - (perturbed * x).cwiseMax(0.0)).squaredNorm() / 100000.0;
    if (exact > top_exact) top_exact = exact, best_exact = i;
    if (relu > top_relu) top_relu = relu, best_relu = i;
  }
  CHECK(best_exact == best_relu);
}
