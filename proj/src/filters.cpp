#include "probstab/filters.hpp"

#include "probstab/linalg.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <type_traits>

namespace probstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix normalized_self_loop(const Matrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  const Matrix with_loops = adjacency + Matrix::Identity(n, n);
  const Vector inv_sqrt = with_loops.rowwise().sum().cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * with_loops * inv_sqrt.asDiagonal();
}

Matrix polynomial(const Matrix& s, const std::vector<double>& coeffs) {
  // Horner evaluation.
  const Eigen::Index n = s.rows();
  Matrix acc = coeffs.back() * Matrix::Identity(n, n);
  for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) {
    acc = s * acc;
    acc.diagonal().array() += *it;
  }
  return acc;
}

Matrix matrix_power(const Matrix& s, int k) {
  Matrix out = s;
  for (int i = 1; i < k; ++i) out = out * s;
  return out;
}

Matrix symmetrized(Matrix m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void validate(const FilterSpec& spec) {
  std::visit(Overloaded{
                 [](const SgcPowerFilter& f) {
                   if (f.k < 1) throw Error(ErrorKind::InvalidParameter, "sgc power k must be >= 1");
                 },
                 [](const PolynomialAdjacencyFilter& f) {
                   if (f.coeffs.empty()) {
                     throw Error(ErrorKind::InvalidParameter, "polynomial needs coefficients");
                   }
                 },
                 [](const PolynomialLaplacianFilter& f) {
                   if (f.coeffs.empty()) {
                     throw Error(ErrorKind::InvalidParameter, "polynomial needs coefficients");
                   }
                 },
                 [](const LowPassFilter& f) {
                   if (!(f.alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha must be > 0");
                 },
                 [](const HeatDiffusionFilter& f) {
                   if (!(f.tau > 0.0)) throw Error(ErrorKind::InvalidParameter, "tau must be > 0");
                 },
                 [](const auto&) {},
             },
             spec);
}

std::string filter_name(const FilterSpec& spec) {
  return std::visit(Overloaded{
                        [](const AdjacencyFilter&) { return std::string("adjacency"); },
                        [](const LaplacianFilter&) { return std::string("laplacian"); },
                        [](const NormalizedAdjacencyFilter&) {
                          return std::string("normalized_adjacency");
                        },
                        [](const SgcPowerFilter&) { return std::string("sgc"); },
                        [](const PolynomialAdjacencyFilter&) {
                          return std::string("polynomial_adjacency");
                        },
                        [](const PolynomialLaplacianFilter&) {
                          return std::string("polynomial_laplacian");
                        },
                        [](const LowPassFilter&) { return std::string("low_pass"); },
                        [](const HeatDiffusionFilter&) { return std::string("heat"); },
                        [](const GinConvFilter&) { return std::string("gin"); },
                    },
                    spec);
}

Matrix build_filter(const FilterSpec& spec, const Matrix& adjacency) {
  validate(spec);
  const Eigen::Index n = adjacency.rows();
  const Matrix out = std::visit(
      Overloaded{
          [&](const AdjacencyFilter&) -> Matrix { return adjacency; },
          [&](const LaplacianFilter&) -> Matrix { return laplacian(adjacency); },
          [&](const NormalizedAdjacencyFilter&) -> Matrix {
            return normalized_self_loop(adjacency);
          },
          [&](const SgcPowerFilter& f) -> Matrix {
            return matrix_power(normalized_self_loop(adjacency), f.k);
          },
          [&](const PolynomialAdjacencyFilter& f) -> Matrix {
            return polynomial(adjacency, f.coeffs);
          },
          [&](const PolynomialLaplacianFilter& f) -> Matrix {
            return polynomial(laplacian(adjacency), f.coeffs);
          },
          [&](const LowPassFilter& f) -> Matrix {
            const Matrix system = Matrix::Identity(n, n) + f.alpha * laplacian(adjacency);
            return system.llt().solve(Matrix::Identity(n, n));
          },
          [&](const HeatDiffusionFilter& f) -> Matrix {
            return matrix_exponential(-f.tau * laplacian(adjacency));
          },
          [&](const GinConvFilter& f) -> Matrix {
            Matrix m = adjacency;
            m.diagonal().array() += 1.0 + f.eps;
            return m;
          },
      },
      spec);
  // Products of symmetric factors drift from symmetry at round-off level.
  return symmetrized(out);
}

Matrix build_filter(const FilterSpec& spec, const Graph& g) {
  return build_filter(spec, g.adjacency());
}

Matrix apply_filter(const FilterSpec& spec, const Graph& g, const Matrix& signals) {
  if (signals.rows() != g.n()) {
    throw Error(ErrorKind::DimensionMismatch, "signal rows must equal vertex count");
  }
  if (const auto* low_pass = std::get_if<LowPassFilter>(&spec)) {
    validate(spec);
    const Matrix system =
        Matrix::Identity(g.n(), g.n()) + low_pass->alpha * laplacian(g.adjacency());
    return system.llt().solve(signals);
  }
  return build_filter(spec, g) * signals;
}

FilterPerturbation filter_perturbation(const FilterSpec& spec, const Graph& g,
                                       const EdgePerturbation& p) {
  const Graph perturbed = apply_perturbation(g, p);
  return {build_filter(spec, g) - build_filter(spec, perturbed), spec, p};
}

double filter_norm_bound(const FilterSpec& spec, const Graph& g, const EdgePerturbation& p) {
  const Graph perturbed = apply_perturbation(g, p);
  return std::max(spectral_norm(build_filter(spec, g)), spectral_norm(build_filter(spec, perturbed)));
}

}  // namespace probstab
