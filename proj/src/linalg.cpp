#include "heis/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace heis {

Mat orthonormal_basis(const Mat& cols, double tol) {
  if (cols.cols() == 0) return Mat(cols.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  const double largest = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol * std::max(largest, 1.0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

int numerical_rank(const Mat& cols, double tol) {
  return static_cast<int>(orthonormal_basis(cols, tol).cols());
}

bool in_span(const Mat& basis, const Vec& v, double tol) {
  const Vec residual = v - basis * (basis.transpose() * v);
  return residual.norm() <= tol * std::max(1.0, v.norm());
}

bool span_contains(const Mat& basis, const Mat& sub, double tol) {
  for (int j = 0; j < sub.cols(); ++j) {
    if (!in_span(basis, sub.col(j), tol)) return false;
  }
  return true;
}

Mat invariant_closure(const Mat& op, const Mat& seed, int max_iter, double tol) {
  Mat basis = orthonormal_basis(seed, tol);
  for (int k = 0; k < max_iter; ++k) {
    if (basis.cols() == basis.rows()) break;
    Mat grown(basis.rows(), 2 * basis.cols());
    grown << basis, op * basis;
    Mat next = orthonormal_basis(grown, tol);
    if (next.cols() == basis.cols()) break;
    basis = next;
  }
  return basis;
}

Mat sym_pinv(const Mat& S, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const Vec& ev = es.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  Vec inv = Vec::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > tol * std::max(largest, 1.0)) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat expm(const Mat& M) { return M.exp(); }

int kalman_rank(const Mat& A, const Mat& B, double tol) {
  const int n = static_cast<int>(A.rows());
  Mat ctrb(n, n * B.cols());
  ctrb.leftCols(B.cols()) = B;
  for (int i = 1; i < n; ++i) {
    ctrb.middleCols(B.cols() * i, B.cols()) =
        A * ctrb.middleCols(B.cols() * (i - 1), B.cols());
  }
  return numerical_rank(ctrb, tol);
}

}  // namespace heis
