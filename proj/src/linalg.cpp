#include "probstab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <span>

namespace probstab {

namespace {

constexpr int kMaxPowerIterations = 500;
constexpr double kResidualTolerance = 1e-11;

// Fixed, generic start vector: never exactly orthogonal to a dominant
// eigenvector arising from structured (0/1, permutation-symmetric) inputs.
Vector start_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  return v.normalized();
}

void canonical_sign(SingularPair& pair) {
  Eigen::Index idx = 0;
  pair.right.cwiseAbs().maxCoeff(&idx);
  if (pair.right(idx) < 0.0) {
    pair.right = -pair.right;
    pair.left = -pair.left;
  }
}

SingularPair dense_fallback(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.transpose() * m);
  const Eigen::Index last = solver.eigenvalues().size() - 1;
  SingularPair out;
  out.value = std::sqrt(std::max(0.0, solver.eigenvalues()(last)));
  out.right = solver.eigenvectors().col(last);
  out.left = out.value > 0.0 ? Vector(m * out.right / out.value) : Vector::Zero(m.rows());
  return out;
}

}  // namespace

SingularPair top_singular_pair(const Matrix& m) {
  SingularPair out;
  if (m.size() == 0 || m.squaredNorm() == 0.0) {
    out.left = Vector::Zero(m.rows());
    out.right = Vector::Zero(m.cols());
    return out;
  }
  const Matrix gram = m.transpose() * m;
  Vector v = start_vector(m.cols());
  bool converged = false;
  double lambda = 0.0;
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    const Vector w = gram * v;
    lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (lambda > 0.0 && residual <= kResidualTolerance * lambda) {
      converged = true;
      break;
    }
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
  }
  if (!converged) {
    out = dense_fallback(m);
  } else {
    out.value = std::sqrt(lambda);
    out.right = v;
    out.left = m * v / out.value;
  }
  canonical_sign(out);
  return out;
}

double spectral_norm(const Matrix& m) { return top_singular_pair(m).value; }

namespace {

Matrix pade_small(const Matrix& a, std::span<const double> b) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix odd = b[1] * id;
  Matrix even = b[0] * id;
  Matrix power = id;
  for (std::size_t k = 2; k < b.size(); k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < b.size()) odd += b[k + 1] * power;
  }
  const Matrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

Matrix pade13(const Matrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * id);
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "expm needs a square matrix");
  if (a.size() == 0) return a;
  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0,   30270240.0,   2162160.0,
                                                110880.0,      3960.0,       90.0,
                                                1.0};
  // Backward-error thresholds for double precision (Higham 2005).
  constexpr double theta3 = 1.495585217958292e-2;
  constexpr double theta5 = 2.539398330063230e-1;
  constexpr double theta7 = 9.504178996162932e-1;
  constexpr double theta9 = 2.097847961257068e0;
  constexpr double theta13 = 5.371920351148152e0;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= theta3) return pade_small(a, b3);
  if (norm1 <= theta5) return pade_small(a, b5);
  if (norm1 <= theta7) return pade_small(a, b7);
  if (norm1 <= theta9) return pade_small(a, b9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  Matrix result = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Matrix symmetric_pinv(const Matrix& s, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  const Vector& lambda = solver.eigenvalues();
  const double scale = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;
  Vector inv = Vector::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) > rel_cutoff * scale) inv(i) = 1.0 / lambda(i);
  }
  const Matrix& u = solver.eigenvectors();
  return u * inv.asDiagonal() * u.transpose();
}

Matrix psd_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  const Vector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& u = solver.eigenvectors();
  return u * root.asDiagonal() * u.transpose();
}

double min_eigenvalue(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace probstab
