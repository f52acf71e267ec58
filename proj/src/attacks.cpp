#include "probstab/attacks.hpp"

#include "probstab/linalg.hpp"
#include "probstab/rng.hpp"
#include "probstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace probstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_attackable(const FilterSpec& spec) {
  if (std::holds_alternative<HeatDiffusionFilter>(spec) ||
      std::holds_alternative<LowPassFilter>(spec)) {
    throw Error(ErrorKind::UnsupportedFilter,
                "filter '" + filter_name(spec) + "' is not supported by the relaxation");
  }
  validate(spec);
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Gradient of <G, sum_k c_k S^k> with respect to S.
Matrix polynomial_backprop(const Matrix& s, const std::vector<double>& coeffs, const Matrix& g) {
  const Eigen::Index n = s.rows();
  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) powers.push_back(powers.back() * s);
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      out += coeffs[k] * powers[j].transpose() * g * powers[k - 1 - j].transpose();
    }
  }
  return out;
}

Matrix laplacian_backprop(const Matrix& g) {
  // L_ii = sum_j A_ij, L_ij = -A_ij.
  Matrix out = -g;
  out.colwise() += g.diagonal();
  return out;
}

// Gradient through N = D^{-1/2} (A + I) D^{-1/2}, D = diag((A + I) 1).
Matrix normalized_backprop(const Matrix& adjacency, const Matrix& g) {
  const Eigen::Index n = adjacency.rows();
  const Matrix with_loops = adjacency + Matrix::Identity(n, n);
  const Vector degree = with_loops.rowwise().sum();
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Matrix normalized = inv_sqrt.asDiagonal() * with_loops * inv_sqrt.asDiagonal();
  const Matrix weighted = g.cwiseProduct(normalized);
  const Vector gd = -0.5 * (weighted.rowwise().sum() + weighted.colwise().sum().transpose())
                              .cwiseQuotient(degree);
  Matrix out = inv_sqrt.asDiagonal() * g * inv_sqrt.asDiagonal();
  out.colwise() += gd;
  return out;
}

// Pull an upstream gradient on g(A') back to the entries of A'.
Matrix filter_backprop(const FilterSpec& spec, const Matrix& adjacency, const Matrix& upstream) {
  const Matrix g = sym(upstream);
  return std::visit(
      Overloaded{
          [&](const AdjacencyFilter&) -> Matrix { return g; },
          [&](const GinConvFilter&) -> Matrix { return g; },
          [&](const LaplacianFilter&) -> Matrix { return laplacian_backprop(g); },
          [&](const PolynomialAdjacencyFilter& f) -> Matrix {
            return polynomial_backprop(adjacency, f.coeffs, g);
          },
          [&](const PolynomialLaplacianFilter& f) -> Matrix {
            return laplacian_backprop(polynomial_backprop(laplacian(adjacency), f.coeffs, g));
          },
          [&](const NormalizedAdjacencyFilter&) -> Matrix {
            return normalized_backprop(adjacency, g);
          },
          [&](const SgcPowerFilter& f) -> Matrix {
            const Matrix normalized = build_filter(NormalizedAdjacencyFilter{}, adjacency);
            std::vector<double> coeffs(static_cast<std::size_t>(f.k) + 1, 0.0);
            coeffs.back() = 1.0;
            return normalized_backprop(adjacency, polynomial_backprop(normalized, coeffs, g));
          },
          [&](const auto&) -> Matrix {
            throw Error(ErrorKind::UnsupportedFilter, "no gradient for " + filter_name(spec));
          },
      },
      spec);
}

Matrix relaxed_perturbation_matrix(const Graph& g, const FilterSpec& spec, const Matrix& m) {
  return build_filter(spec, g) - build_filter(spec, relaxed_adjacency(g, m));
}

double evaluate(const Graph& g, const FilterSpec& spec, const SecondMoment* k, const Matrix& m) {
  const Matrix e = relaxed_perturbation_matrix(g, spec, m);
  if (k) return expected_perturbation(*k, e);
  const double s = spectral_norm(e);
  return s * s;
}

Matrix finite_difference(const Graph& g, const FilterSpec& spec, const SecondMoment* k,
                         const Matrix& m, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParameter, "fd_step must be positive");
  const int n = g.n();
  Matrix out = Matrix::Zero(n, n);
  Matrix probe = m;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double base = m(u, v);
      probe(u, v) = probe(v, u) = base + h;
      const double up = evaluate(g, spec, k, probe);
      probe(u, v) = probe(v, u) = base - h;
      const double down = evaluate(g, spec, k, probe);
      probe(u, v) = probe(v, u) = base;
      out(u, v) = out(v, u) = 0.25 * (up - down) / h;
    }
  }
  return out;
}

Matrix analytic_gradient(const Graph& g, const FilterSpec& spec, const SecondMoment* k,
                         const Matrix& m) {
  const int n = g.n();
  const Matrix relaxed = relaxed_adjacency(g, m);
  const Matrix e = build_filter(spec, g) - build_filter(spec, relaxed);
  Matrix grad_e;
  if (k) {
    grad_e = 2.0 * e * k->matrix();
  } else {
    const SingularPair top = top_singular_pair(e);
    grad_e = 2.0 * top.value * top.left * top.right.transpose();
  }
  // E = g(A) - g(A(M)), so the gradient on g(A(M)) is -grad_e.
  const Matrix grad_a = filter_backprop(spec, relaxed, -grad_e);
  const Matrix flip = Matrix::Ones(n, n) - 2.0 * g.adjacency();
  Matrix out = sym(flip.cwiseProduct(grad_a));
  out.diagonal().setZero();
  return out;
}

Matrix checked_square(const Graph& g, const Matrix& m) {
  if (m.rows() != g.n() || m.cols() != g.n()) {
    throw Error(ErrorKind::DimensionMismatch, "relaxed matrix size != n");
  }
  return m;
}

std::size_t count_nonzero(const Matrix& m) {
  return static_cast<std::size_t>((m.array().abs() > 1e-12).count());
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return out;
}

Matrix initial_iterate(int n, std::uint64_t seed) {
  auto rng = SplitMix64::substream(seed, 0x6a1773ULL);
  Matrix m = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) m(u, v) = m(v, u) = 1e-6 * rng.uniform();
  }
  return m;
}

AttackResult run_pgd(const Graph& g, const FilterSpec& spec, const SecondMoment* k,
                     const AttackConfig& cfg) {
  cfg.validate();
  require_attackable(spec);
  const int n = g.n();
  if (k && k->n() != n) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  if (cfg.budget > pair_count(n)) {
    throw Error(ErrorKind::BudgetTooLarge, "budget exceeds the number of vertex pairs");
  }
  double step = cfg.learning_rate;
  if (step <= 0.0) {
    const double k_norm = k ? spectral_norm(k->matrix()) : 1.0;
    step = k_norm > 0.0 ? 0.1 / k_norm : 0.1;
  }

  AttackResult result;
  Matrix m = project_budget_box(initial_iterate(n, cfg.seed), cfg.budget).matrix();
  result.converged = false;
  const double stop_count = 2.0 * static_cast<double>(cfg.budget) + 2.0 * cfg.tolerance;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Matrix grad = k ? gradient(g, spec, *k, m, cfg.gradient_mode, cfg.fd_step)
                          : worst_case_gradient(g, spec, m, cfg.gradient_mode, cfg.fd_step);
    m = project_budget_box(m + step * grad, cfg.budget).matrix();
    result.trace.push_back(evaluate(g, spec, k, m));
    result.iterations_used = t;
    if (static_cast<double>(count_nonzero(m)) <= stop_count) {
      result.converged = true;
      break;
    }
  }
  result.relaxed_final = RelaxedPerturbation(m);
  result.perturbation = perturbation_from_relaxed(g, result.relaxed_final, cfg.budget);
  const Matrix e = filter_perturbation(spec, g, result.perturbation).E;
  if (k) {
    result.objective = expected_perturbation(*k, e);
  } else {
    const double s = spectral_norm(e);
    result.objective = s * s;
  }
  return result;
}

}  // namespace

void AttackConfig::validate() const {
  if (budget < 1) throw Error(ErrorKind::InvalidParameter, "budget must be >= 1");
  if (max_iters < 1) throw Error(ErrorKind::InvalidParameter, "max_iters must be >= 1");
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::InvalidParameter, "learning_rate must be positive (0 = automatic)");
  }
  if (tolerance < 0.0) throw Error(ErrorKind::InvalidParameter, "tolerance must be >= 0");
  if (!(fd_step > 0.0)) throw Error(ErrorKind::InvalidParameter, "fd_step must be > 0");
}

EdgePerturbation random_attack(const Graph& g, std::size_t budget, std::uint64_t seed) {
  auto pairs = all_pairs(g.n());
  if (budget > pairs.size()) {
    throw Error(ErrorKind::BudgetTooLarge, "budget exceeds the number of vertex pairs");
  }
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
  }
  pairs.resize(budget);
  std::sort(pairs.begin(), pairs.end());
  return EdgePerturbation::flip(g, pairs);
}

Matrix relaxed_adjacency(const Graph& g, const Matrix& m) {
  checked_square(g, m);
  const Matrix& a = g.adjacency();
  Matrix out = a + (Matrix::Ones(g.n(), g.n()) - 2.0 * a).cwiseProduct(m);
  out.diagonal().setZero();
  return out;
}

double relax_and_evaluate(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                          const RelaxedPerturbation& m) {
  require_attackable(spec);
  if (k.n() != g.n()) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  return evaluate(g, spec, &k, checked_square(g, m.matrix()));
}

double relaxed_worst_case(const Graph& g, const FilterSpec& spec, const RelaxedPerturbation& m) {
  require_attackable(spec);
  return evaluate(g, spec, nullptr, checked_square(g, m.matrix()));
}

Matrix gradient(const Graph& g, const FilterSpec& spec, const SecondMoment& k, const Matrix& m,
                GradientMode mode, double fd_step) {
  require_attackable(spec);
  checked_square(g, m);
  if (k.n() != g.n()) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  return mode == GradientMode::Analytic ? analytic_gradient(g, spec, &k, m)
                                        : finite_difference(g, spec, &k, m, fd_step);
}

Matrix worst_case_gradient(const Graph& g, const FilterSpec& spec, const Matrix& m,
                           GradientMode mode, double fd_step) {
  require_attackable(spec);
  checked_square(g, m);
  return mode == GradientMode::Analytic ? analytic_gradient(g, spec, nullptr, m)
                                        : finite_difference(g, spec, nullptr, m, fd_step);
}

RelaxedPerturbation project_budget_box(const Matrix& m, std::size_t budget) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  Matrix s = sym(m);
  s.diagonal().setZero();
  Matrix clipped = s.cwiseMax(0.0).cwiseMin(1.0);
  const double target = 2.0 * static_cast<double>(budget);
  if (clipped.sum() <= target * (1.0 + 1e-12) + 1e-12) return RelaxedPerturbation(clipped);

  // Off-diagonal entries only; the diagonal stays zero for every shift.
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      if (i != j) values.push_back(s(i, j));
    }
  }
  auto mass = [&](double mu) {
    double total = 0.0;
    for (double x : values) total += std::clamp(x - mu, 0.0, 1.0);
    return total;
  };
  double lo = 0.0;
  double hi = *std::max_element(values.begin(), values.end());
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > target ? lo : hi) = mid;
  }
  double mu = 0.5 * (lo + hi);
  // Solve exactly on the active set identified by the bracket.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  std::size_t upper_count = 0;
  for (double x : values) {
    const double shifted = x - mu;
    if (shifted >= 1.0) {
      ++upper_count;
    } else if (shifted > 0.0) {
      free_sum += x;
      ++free_count;
    }
  }
  if (free_count > 0) {
    const double exact = (free_sum + static_cast<double>(upper_count) - target) /
                         static_cast<double>(free_count);
    if (std::abs(exact - mu) <= 1e-9 * std::max(1.0, std::abs(mu)) &&
        std::abs(mass(exact) - target) <= std::abs(mass(mu) - target)) {
      mu = exact;
    }
  }
  Matrix out = (s.array() - mu).cwiseMax(0.0).cwiseMin(1.0).matrix();
  out.diagonal().setZero();
  return RelaxedPerturbation(sym(out));
}

AttackResult prob_pgd(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                      const AttackConfig& cfg) {
  return run_pgd(g, spec, &k, cfg);
}

AttackResult wst_pgd(const Graph& g, const FilterSpec& spec, const AttackConfig& cfg) {
  return run_pgd(g, spec, nullptr, cfg);
}

double attack_objective(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                        const EdgePerturbation& p) {
  return expected_perturbation(k, filter_perturbation(spec, g, p).E);
}

AttackResult brute_force_attack(const Graph& g, const FilterSpec& spec, const SecondMoment& k,
                                std::size_t budget, AttackObjective objective) {
  validate(spec);
  const int n = g.n();
  if (k.n() != n) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  const auto pairs = all_pairs(n);
  if (budget > pairs.size()) {
    throw Error(ErrorKind::BudgetTooLarge, "budget exceeds the number of vertex pairs");
  }
  if (binomial(pairs.size(), budget) > 2e6) {
    throw Error(ErrorKind::InstanceTooLarge, "more than 2e6 candidate perturbations");
  }
  const Matrix base = build_filter(spec, g);
  std::vector<std::size_t> idx(budget);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> best_idx;
  double best = -std::numeric_limits<double>::infinity();
  Matrix perturbed_a = g.adjacency();
  while (true) {
    for (std::size_t i : idx) {
      const auto& p = pairs[i];
      const double flipped = g.has_edge(p.u, p.v) ? 0.0 : 1.0;
      perturbed_a(p.u, p.v) = perturbed_a(p.v, p.u) = flipped;
    }
    const Matrix e = base - build_filter(spec, perturbed_a);
    double value;
    if (objective == AttackObjective::Expected) {
      value = expected_perturbation(k, e);
    } else {
      const double s = spectral_norm(e);
      value = s * s;
    }
    if (value > best) {
      best = value;
      best_idx = idx;
    }
    for (std::size_t i : idx) {
      const auto& p = pairs[i];
      perturbed_a(p.u, p.v) = perturbed_a(p.v, p.u) = g.adjacency()(p.u, p.v);
    }
    // Next combination in lexicographic order.
    std::size_t pos = budget;
    while (pos > 0 && idx[pos - 1] == pairs.size() - budget + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < budget; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::vector<VertexPair> chosen;
  for (std::size_t i : best_idx) chosen.push_back(pairs[i]);
  AttackResult result;
  result.perturbation = EdgePerturbation::flip(g, chosen);
  result.objective = best;
  result.trace = {best};
  result.iterations_used = 1;
  result.converged = true;
  result.relaxed_final = RelaxedPerturbation::indicator(n, result.perturbation);
  return result;
}

EdgePerturbation structural_heuristic(const SecondMoment& k, const Graph& g, std::size_t budget,
                                      HeuristicMode mode) {
  const int n = g.n();
  if (k.n() != n) throw Error(ErrorKind::DimensionMismatch, "K and graph sizes differ");
  if (budget < 1) throw Error(ErrorKind::InvalidParameter, "budget must be >= 1");
  const auto pairs = all_pairs(n);
  if (budget > pairs.size()) {
    throw Error(ErrorKind::BudgetTooLarge, "budget exceeds the number of vertex pairs");
  }
  const Matrix& km = k.matrix();
  const bool laplacian_mode = mode == HeuristicMode::RemarkL;
  auto sign_of = [&](const VertexPair& p) { return g.has_edge(p.u, p.v) ? -1 : 1; };
  auto self_score = [&](const VertexPair& p) {
    return laplacian_mode ? 2.0 * pair_distance(k, p.u, p.v) : km(p.u, p.u) + km(p.v, p.v);
  };
  // Coupling contribution of two distinct pairs; nullopt when disjoint.
  auto coupling = [&](const VertexPair& a, const VertexPair& b) -> std::optional<double> {
    int shared, x, y;
    if (a.u == b.u) {
      shared = a.u, x = a.v, y = b.v;
    } else if (a.u == b.v) {
      shared = a.u, x = a.v, y = b.u;
    } else if (a.v == b.u) {
      shared = a.v, x = a.u, y = b.v;
    } else if (a.v == b.v) {
      shared = a.v, x = a.u, y = b.u;
    } else {
      return std::nullopt;
    }
    const double ss = sign_of(a) * sign_of(b);
    if (laplacian_mode) {
      return ss * (pair_distance(k, shared, x) + pair_distance(k, shared, y) -
                   pair_distance(k, x, y));
    }
    return 2.0 * ss * km(x, y);
  };

  std::vector<VertexPair> chosen;
  std::vector<bool> used(pairs.size(), false);
  while (chosen.size() < budget) {
    double best_restricted = -std::numeric_limits<double>::infinity();
    double best_any = -std::numeric_limits<double>::infinity();
    std::size_t pick_restricted = pairs.size();
    std::size_t pick_any = pairs.size();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (used[i]) continue;
      double gain = self_score(pairs[i]);
      bool touches = false;
      bool uniform = true;
      for (const auto& c : chosen) {
        const auto term = coupling(c, pairs[i]);
        if (!term) continue;
        touches = true;
        gain += *term;
        if (sign_of(c) != sign_of(pairs[i])) uniform = false;
      }
      if (gain > best_any) {
        best_any = gain;
        pick_any = i;
      }
      const bool eligible = touches && (!laplacian_mode || uniform);
      if (eligible && gain > best_restricted) {
        best_restricted = gain;
        pick_restricted = i;
      }
    }
    const std::size_t pick = pick_restricted < pairs.size() ? pick_restricted : pick_any;
    used[pick] = true;
    chosen.push_back(pairs[pick]);
  }
  std::sort(chosen.begin(), chosen.end());
  return EdgePerturbation::flip(g, chosen);
}

std::string to_string(GradientMode mode) {
  return mode == GradientMode::Analytic ? "analytic" : "finite_difference";
}

std::string to_string(HeuristicMode mode) {
  return mode == HeuristicMode::RemarkA ? "remark_a" : "remark_l";
}

}  // namespace probstab
