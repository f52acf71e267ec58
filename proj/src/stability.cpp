#include "probstab/stability.hpp"

#include "probstab/linalg.hpp"
#include "probstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace probstab {

namespace {

void require_square(const Matrix& e, int n, const char* what) {
  if (e.rows() != n || e.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                    ", got " + std::to_string(e.rows()) + "x" + std::to_string(e.cols()));
  }
}

struct SharedVertex {
  int shared;
  int first_other;
  int second_other;
};

std::optional<SharedVertex> shared_vertex(const VertexPair& a, const VertexPair& b) {
  if (a.u == b.u) return SharedVertex{a.u, a.v, b.v};
  if (a.u == b.v) return SharedVertex{a.u, a.v, b.u};
  if (a.v == b.u) return SharedVertex{a.v, a.u, b.v};
  if (a.v == b.v) return SharedVertex{a.v, a.u, b.u};
  return std::nullopt;
}

void check_pairs(const SecondMoment& k, const Graph& g, const EdgePerturbation& p) {
  if (k.n() != g.n()) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  p.validate(g);
}

}  // namespace

double expected_perturbation(const SecondMoment& k, const Matrix& e) {
  require_square(e, k.n(), "filter perturbation");
  const Matrix ete = e.transpose() * e;
  return frobenius_inner(k.matrix(), ete);
}

double expected_perturbation(const SecondMoment& k, const FilterPerturbation& e) {
  return expected_perturbation(k, e.E);
}

TailBound markov_tail(double expected, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::NonpositiveC, "c must be positive");
  return {(1.0 + c) * expected, 1.0 / (1.0 + c)};
}

double single_layer_bound(const SecondMoment& k, const Matrix& e, const Matrix& theta,
                          double lipschitz, int d) {
  const double norm = spectral_norm(theta);
  return d * lipschitz * lipschitz * norm * norm * expected_perturbation(k, e);
}

double multilayer_bound(const SecondMoment& k, const Matrix& e, const GcnnModel& model,
                        double filter_norm, int d, double measured_filter_norm) {
  model.validate();
  const int depth = model.depth();
  for (int l = 0; l + 1 < depth; ++l) {
    if (!model.layers[l].activation.zero_preserving()) {
      throw Error(ErrorKind::AssumptionViolated,
                  "hidden layer " + std::to_string(l + 1) + " activation '" +
                      model.layers[l].activation.name() + "' does not satisfy sigma(0) = 0");
    }
  }
  if (filter_norm < measured_filter_norm) {
    throw Error(ErrorKind::AssumptionViolated, "filter-norm constant C is below max(||g(S)||, ||g(S_p)||)");
  }
  double c_sigma = 0.0;
  double weight_product = 1.0;
  for (const auto& layer : model.layers) {
    c_sigma = std::max(c_sigma, layer.activation.lipschitz());
    const double norm = spectral_norm(layer.weights);
    weight_product *= norm * norm;
  }
  const double e_norm = spectral_norm(e);
  const double inner = static_cast<double>(depth - 1) * e_norm * e_norm * k.trace() +
                       expected_perturbation(k, e);
  return d * std::pow(c_sigma, 2 * depth) * std::pow(filter_norm, 2 * depth - 2) *
         weight_product * inner;
}

Decomposition adjacency_decomposition(const SecondMoment& k, const Graph& g,
                                      const EdgePerturbation& p) {
  check_pairs(k, g, p);
  const Matrix& km = k.matrix();
  const auto& pairs = p.pairs();
  Decomposition out;
  for (const auto& sp : pairs) out.self_term += km(sp.pair.u, sp.pair.u) + km(sp.pair.v, sp.pair.v);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto s = shared_vertex(pairs[i].pair, pairs[j].pair);
      if (!s) continue;
      out.coupling_term +=
          2.0 * pairs[i].sign * pairs[j].sign * km(s->first_other, s->second_other);
    }
  }
  out.total = out.self_term + out.coupling_term;
  return out;
}

Decomposition laplacian_decomposition(const SecondMoment& k, const Graph& g,
                                      const EdgePerturbation& p) {
  check_pairs(k, g, p);
  const auto& pairs = p.pairs();
  Decomposition out;
  for (const auto& sp : pairs) out.self_term += 2.0 * pair_distance(k, sp.pair.u, sp.pair.v);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto s = shared_vertex(pairs[i].pair, pairs[j].pair);
      if (!s) continue;
      const double r = pair_distance(k, s->shared, s->first_other) +
                       pair_distance(k, s->shared, s->second_other) -
                       pair_distance(k, s->first_other, s->second_other);
      out.coupling_term += pairs[i].sign * pairs[j].sign * r;
    }
  }
  out.total = out.self_term + out.coupling_term;
  return out;
}

double pair_distance(const SecondMoment& k, int u, int v) {
  if (u < 0 || v < 0 || u >= k.n() || v >= k.n()) {
    throw Error(ErrorKind::IndexOutOfRange, "vertex index out of range");
  }
  const Matrix& km = k.matrix();
  return km(u, u) + km(v, v) - 2.0 * km(u, v);
}

std::vector<double> per_sample_perturbations(const Matrix& e, const Matrix& signals) {
  if (e.cols() != signals.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "E columns must match signal rows");
  }
  const Matrix y = e * signals;
  std::vector<double> out(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index i = 0; i < y.cols(); ++i) out[static_cast<std::size_t>(i)] = y.col(i).squaredNorm();
  return out;
}

StabilityReport stability_report(const SecondMoment& k, const Matrix& e, int n,
                                 const std::optional<Matrix>& signals) {
  require_square(e, n, "filter perturbation");
  StabilityReport r;
  r.expected = expected_perturbation(k, e);
  const double s = spectral_norm(e);
  r.worst_case = s * s;
  r.uniform_sphere = frobenius_norm_sq(e) / n;
  if (signals) r.per_sample = per_sample_perturbations(e, *signals);
  return r;
}

std::vector<double> monte_carlo_perturbations(const SecondMoment& k, const Matrix& e,
                                              std::size_t samples, std::uint64_t seed,
                                              std::size_t batch) {
  require_square(e, k.n(), "filter perturbation");
  if (batch == 0) throw Error(ErrorKind::InvalidParameter, "batch size must be positive");
  const int n = k.n();
  const Matrix transform = e * psd_sqrt(k.matrix());
  const std::size_t batches = (samples + batch - 1) / batch;
  std::vector<double> out(samples);

  auto run_batch = [&](std::size_t b) {
    auto rng = SplitMix64::substream(seed, b);
    const std::size_t begin = b * batch;
    const std::size_t count = std::min(batch, samples - begin);
    Matrix z(n, static_cast<Eigen::Index>(count));
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.normal();
    }
    const Matrix y = transform * z;
    for (std::size_t j = 0; j < count; ++j) out[begin + j] = y.col(static_cast<Eigen::Index>(j)).squaredNorm();
  };

  const std::size_t workers =
      std::min<std::size_t>(batches, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t b = w; b < batches; b += workers) run_batch(b);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

double pairwise_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level(values);
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 2 * i + 1 < level.size() ? level[2 * i] + level[2 * i + 1] : level[2 * i];
    }
    level.swap(next);
  }
  return level.front();
}

}  // namespace probstab
