#pragma once

#include <Eigen/Dense>
#include <optional>

namespace heis {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Orthonormal basis of the column span of `cols`, computed by SVD.
/// Singular values below `tol * largest` are treated as zero.
Mat orthonormal_basis(const Mat& cols, double tol);

/// Numerical rank of `cols` with relative threshold `tol * largest singular value`.
int numerical_rank(const Mat& cols, double tol);

/// True if v lies in the column span of the orthonormal `basis`.
bool in_span(const Mat& basis, const Vec& v, double tol);

/// True if every column of `sub` lies in the column span of the orthonormal `basis`.
bool span_contains(const Mat& basis, const Mat& sub, double tol);

/// Smallest invariant subspace containing span(seed) under repeated
/// application of `op` (at most `max_iter` rounds, each adds op * current).
Mat invariant_closure(const Mat& op, const Mat& seed, int max_iter, double tol);

/// Moore-Penrose pseudo-inverse of a symmetric matrix via eigendecomposition.
Mat sym_pinv(const Mat& S, double tol);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& S);

/// Matrix exponential.
Mat expm(const Mat& M);

/// Kalman controllability rank of the pair (A, B).
int kalman_rank(const Mat& A, const Mat& B, double tol);

}  // namespace heis
