#pragma once

#include "probstab/core.hpp"

namespace probstab {

/// Leading singular triple of a matrix: m * right = value * left.
struct SingularPair {
  double value = 0.0;
  Vector left;
  Vector right;
};

/// Largest singular value and its vectors. Power iteration on M^T M from a
/// fixed start vector; falls back to a dense symmetric eigensolver when the
/// iteration stagnates. The zero matrix yields value 0 and zero vectors.
SingularPair top_singular_pair(const Matrix& m);

/// Largest singular value, relative accuracy ~1e-10.
double spectral_norm(const Matrix& m);

/// exp(A) by scaling and squaring with a degree-13 Pade approximant.
Matrix matrix_exponential(const Matrix& a);

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues below
/// `rel_cutoff * max|lambda|` are treated as zero.
Matrix symmetric_pinv(const Matrix& s, double rel_cutoff = 1e-10);

/// Symmetric square root of a positive semidefinite matrix (negative
/// round-off eigenvalues clamped to zero).
Matrix psd_sqrt(const Matrix& s);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& s);

}  // namespace probstab
