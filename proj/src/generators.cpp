#include "probstab/generators.hpp"

#include "probstab/linalg.hpp"
#include "probstab/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace probstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void connect(Matrix& a, int u, int v) {
  a(u, v) = 1.0;
  a(v, u) = 1.0;
}

Graph sbm(const SbmModel& m, SplitMix64& rng) {
  int n = 0;
  std::vector<int> block;
  for (std::size_t b = 0; b < m.block_sizes.size(); ++b) {
    for (int i = 0; i < m.block_sizes[b]; ++i) block.push_back(static_cast<int>(b));
    n += m.block_sizes[b];
  }
  Matrix a = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = block[u] == block[v] ? m.p_in : m.p_out;
      if (rng.bernoulli(p)) connect(a, u, v);
    }
  }
  return Graph(std::move(a));
}

Graph barabasi_albert(const BarabasiAlbertModel& m, SplitMix64& rng) {
  Matrix a = Matrix::Zero(m.n, m.n);
  // Each edge contributes both endpoints, so uniform draws from this list are
  // degree-proportional.
  std::vector<int> endpoints;
  for (int u = 0; u < m.attach; ++u) {
    for (int v = u + 1; v < m.attach; ++v) {
      connect(a, u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  for (int t = m.attach; t < m.n; ++t) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < m.attach) {
      const int candidate = endpoints.empty()
                                ? static_cast<int>(rng.below(static_cast<std::uint64_t>(t)))
                                : endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), candidate) == targets.end()) {
        targets.push_back(candidate);
      }
    }
    for (int target : targets) {
      connect(a, t, target);
      endpoints.push_back(t);
      endpoints.push_back(target);
    }
  }
  return Graph(std::move(a));
}

Graph watts_strogatz(const WattsStrogatzModel& m, SplitMix64& rng) {
  Matrix a = Matrix::Zero(m.n, m.n);
  const int half = m.k / 2;
  for (int u = 0; u < m.n; ++u) {
    for (int j = 1; j <= half; ++j) connect(a, u, (u + j) % m.n);
  }
  for (int j = 1; j <= half; ++j) {
    for (int u = 0; u < m.n; ++u) {
      const int v = (u + j) % m.n;
      if (a(u, v) == 0.0 || !rng.bernoulli(m.beta)) continue;
      const double degree = a.row(u).sum();
      if (degree >= m.n - 1) continue;
      int w;
      do {
        w = static_cast<int>(rng.below(static_cast<std::uint64_t>(m.n)));
      } while (w == u || a(u, w) > 0.0);
      a(u, v) = a(v, u) = 0.0;
      connect(a, u, w);
    }
  }
  return Graph(std::move(a));
}

Graph sensor(const SensorModel& m, SplitMix64& rng) {
  std::vector<std::array<double, 2>> points(static_cast<std::size_t>(m.n));
  for (auto& p : points) {
    p[0] = rng.uniform();
    p[1] = rng.uniform();
  }
  Matrix a = Matrix::Zero(m.n, m.n);
  for (int u = 0; u < m.n; ++u) {
    for (int v = u + 1; v < m.n; ++v) {
      const double dx = points[u][0] - points[v][0];
      const double dy = points[u][1] - points[v][1];
      if (std::hypot(dx, dy) < m.radius) connect(a, u, v);
    }
  }
  return Graph(std::move(a));
}

}  // namespace

void validate(const GraphModelSpec& spec) {
  std::visit(Overloaded{
                 [](const SbmModel& m) {
                   require(!m.block_sizes.empty(), "sbm needs at least one block");
                   for (int s : m.block_sizes) require(s >= 1, "sbm block sizes must be >= 1");
                   require(is_probability(m.p_in) && is_probability(m.p_out),
                           "sbm probabilities must lie in [0, 1]");
                 },
                 [](const BarabasiAlbertModel& m) {
                   require(m.attach >= 1, "attach must be >= 1");
                   require(m.n > m.attach, "ba needs n > attach");
                 },
                 [](const WattsStrogatzModel& m) {
                   require(m.k >= 2 && m.k % 2 == 0, "ws degree k must be even and >= 2");
                   require(m.k < m.n, "ws needs k < n");
                   require(is_probability(m.beta), "ws beta must lie in [0, 1]");
                 },
                 [](const SensorModel& m) {
                   require(m.n >= 1, "sensor needs n >= 1");
                   require(m.radius > 0.0, "sensor radius must be > 0");
                 },
                 [](const KarateClubModel&) {},
             },
             spec.model);
}

Graph generate_graph(const GraphModelSpec& spec) {
  validate(spec);
  SplitMix64 rng(spec.seed);
  return std::visit(Overloaded{
                        [&](const SbmModel& m) { return sbm(m, rng); },
                        [&](const BarabasiAlbertModel& m) { return barabasi_albert(m, rng); },
                        [&](const WattsStrogatzModel& m) { return watts_strogatz(m, rng); },
                        [&](const SensorModel& m) { return sensor(m, rng); },
                        [&](const KarateClubModel&) { return karate_club(); },
                    },
                    spec.model);
}

Graph karate_club() {
  static constexpr std::array<std::array<int, 2>, 78> kEdges = {{
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},
      {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},
      {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},
      {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},
      {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
      {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33},
      {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
      {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25}, {24, 27},
      {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
      {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33},
  }};
  std::vector<VertexPair> edges;
  edges.reserve(kEdges.size());
  for (const auto& e : kEdges) edges.emplace_back(e[0], e[1]);
  return Graph::from_edges(34, edges);
}

std::vector<int> two_block_membership(const std::vector<int>& block_sizes) {
  std::vector<int> v;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    v.insert(v.end(), static_cast<std::size_t>(block_sizes[b]), b == 0 ? 1 : -1);
  }
  return v;
}

void validate(const SignalModelSpec& spec) {
  std::visit(Overloaded{
                 [](const CsbmSignals& s) {
                   require(!s.membership.empty(), "csbm membership must be non-empty");
                   for (int x : s.membership) require(x == 1 || x == -1, "membership must be +-1");
                   require(s.mu >= 0.0, "csbm mu must be >= 0");
                 },
                 [](const SmoothSignals& s) {
                   require(s.graph.n() >= 1, "smooth model needs a graph");
                   require(s.noise >= 0.0, "noise level must be >= 0");
                 },
                 [](const IsotropicGaussianSignals& s) { require(s.n >= 1, "n must be >= 1"); },
                 [](const UnitSphereSignals& s) { require(s.n >= 1, "n must be >= 1"); },
             },
             spec.model);
}

int signal_dimension(const SignalModelSpec& spec) {
  return std::visit(Overloaded{
                        [](const CsbmSignals& s) { return static_cast<int>(s.membership.size()); },
                        [](const SmoothSignals& s) { return s.graph.n(); },
                        [](const IsotropicGaussianSignals& s) { return s.n; },
                        [](const UnitSphereSignals& s) { return s.n; },
                    },
                    spec.model);
}

Matrix sample_signals(const SignalModelSpec& spec, int d) {
  validate(spec);
  if (d < 1) throw Error(ErrorKind::InvalidParameter, "need at least one signal");
  const int n = signal_dimension(spec);
  SplitMix64 rng(spec.seed);
  Matrix x(n, d);
  // Column-major fill keeps each signal's draws contiguous in the stream.
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = rng.normal();
  }
  std::visit(Overloaded{
                 [&](const CsbmSignals& s) {
                   const double scale = std::sqrt(s.mu / n) * s.u;
                   for (int i = 0; i < n; ++i) x.row(i).array() += scale * s.membership[i];
                 },
                 [&](const SmoothSignals& s) {
                   const Matrix root = psd_sqrt(laplacian_pinv(s.graph));
                   Matrix noise(n, d);
                   for (int j = 0; j < d; ++j) {
                     for (int i = 0; i < n; ++i) noise(i, j) = rng.normal();
                   }
                   x = root * x + s.noise * noise;
                   x.array() += s.mean;
                 },
                 [&](const IsotropicGaussianSignals&) {},
                 [&](const UnitSphereSignals&) {
                   for (int j = 0; j < d; ++j) x.col(j).normalize();
                 },
             },
             spec.model);
  return x;
}

SecondMoment::SecondMoment(Matrix k) : k_(std::move(k)) {
  if (k_.rows() != k_.cols()) throw Error(ErrorKind::InvariantViolation, "K must be square");
  const double scale = k_.cwiseAbs().maxCoeff();
  if ((k_ - k_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw Error(ErrorKind::InvariantViolation, "K must be symmetric");
  }
  k_ = 0.5 * (k_ + k_.transpose());
  if (k_.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(k_, Eigen::EigenvaluesOnly);
  const Vector& lambda = solver.eigenvalues();
  const double norm = lambda.cwiseAbs().maxCoeff();
  if (lambda(0) < -1e-9 * norm) {
    throw Error(ErrorKind::InvariantViolation, "K must be positive semidefinite");
  }
}

SecondMoment SecondMoment::scaled(double c) const { return SecondMoment(c * k_); }

SecondMoment empirical_second_moment(const Matrix& signals) {
  if (signals.cols() == 0 || signals.rows() == 0) {
    throw Error(ErrorKind::EmptyInput, "no signals to estimate K from");
  }
  Matrix k = signals * signals.transpose() / static_cast<double>(signals.cols());
  return SecondMoment(0.5 * (k + k.transpose()));
}

SecondMoment analytic_second_moment(const SignalModelSpec& spec) {
  validate(spec);
  return std::visit(
      Overloaded{
          [](const CsbmSignals& s) {
            const int n = static_cast<int>(s.membership.size());
            Vector v(n);
            for (int i = 0; i < n; ++i) v(i) = s.membership[i];
            Matrix k = (s.mu / n) * s.u * s.u * v * v.transpose();
            k.diagonal().array() += 1.0;
            return SecondMoment(std::move(k));
          },
          [](const SmoothSignals& s) {
            Matrix k = laplacian_pinv(s.graph);
            k.array() += s.mean * s.mean;
            k.diagonal().array() += s.noise * s.noise;
            return SecondMoment(std::move(k));
          },
          [](const auto&) -> SecondMoment {
            throw Error(ErrorKind::UnsupportedVariant,
                        "analytic second moment only for csbm and smooth models");
          },
      },
      spec.model);
}

Matrix laplacian_pinv(const Graph& g) { return symmetric_pinv(laplacian(g), 1e-10); }

}  // namespace probstab
