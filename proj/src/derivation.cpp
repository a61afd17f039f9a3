#include "heis/derivation.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace heis {

namespace {

// adj([[p, q], [r, s]]) = [[s, -q], [-r, p]]
Eigen::Matrix2d adjugate2(const Eigen::Matrix2d& A) {
  Eigen::Matrix2d adj;
  adj << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
  return adj;
}

const char* structural_violation(const Mat& M, int n, double tol) {
  const int dim = 2 * n + 1;
  if (M.rows() != dim || M.cols() != dim) return "matrix size is not 2n+1";
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int r = 0; r < dim - 1; ++r) {
    if (std::abs(M(r, dim - 1)) > tol * scale) return "center column must be (0,...,0,d)";
  }
  const double d = M(dim - 1, dim - 1);
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix2d Aii = M.block<2, 2>(2 * i, 2 * i);
    if (std::abs(Aii.trace() - d) > tol * scale) {
      return "diagonal block trace must equal d";
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Matrix2d upper = M.block<2, 2>(2 * i, 2 * j);
      const Eigen::Matrix2d lower = M.block<2, 2>(2 * j, 2 * i);
      if (((upper + adjugate2(lower)).cwiseAbs().maxCoeff()) > tol * scale) {
        return "upper block must be minus the adjugate of the mirrored lower block";
      }
    }
  }
  return nullptr;
}

}  // namespace

bool is_derivation_structural(const Mat& M, int n, double tol) {
  return structural_violation(M, n, tol) == nullptr;
}

bool is_derivation_leibniz(const Mat& M, int n, double tol) {
  const int dim = 2 * n + 1;
  if (M.rows() != dim || M.cols() != dim) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int j = 0; j < dim; ++j) {
    const AlgebraElement ej = AlgebraElement::from_flat(Vec::Unit(dim, j));
    const AlgebraElement Dej = AlgebraElement::from_flat(M.col(j));
    for (int k = j + 1; k < dim; ++k) {
      const AlgebraElement ek = AlgebraElement::from_flat(Vec::Unit(dim, k));
      const AlgebraElement Dek = AlgebraElement::from_flat(M.col(k));
      const double ljk = symplectic_form(ej, ek);
      const Vec lhs = ljk * M.col(dim - 1);  // D [e_j, e_k]
      const Vec rhs = bracket(Dej, ek).flat() + bracket(ej, Dek).flat();
      if ((lhs - rhs).norm() > tol * scale) return false;
    }
  }
  return true;
}

bool is_derivation(const Mat& M, int n, double tol, DerivationCheck check) {
  if (M.rows() != 2 * n + 1 || M.cols() != 2 * n + 1) {
    throw std::invalid_argument("is_derivation: matrix size is not 2n+1");
  }
  const bool result = check == DerivationCheck::kStructural
                          ? is_derivation_structural(M, n, tol)
                          : is_derivation_leibniz(M, n, tol);
#ifndef NDEBUG
  assert(is_derivation_structural(M, n, tol) == is_derivation_leibniz(M, n, tol));
#endif
  return result;
}

Derivation Derivation::from_matrix(Mat M, int n, double tol) {
  if (M.rows() != 2 * n + 1 || M.cols() != 2 * n + 1) {
    throw std::invalid_argument("Derivation: matrix size is not 2n+1");
  }
  if (const char* why = structural_violation(M, n, tol)) {
    throw std::invalid_argument(std::string("not a derivation: ") + why);
  }
  Derivation D;
  D.n = n;
  D.d = M(2 * n, 2 * n);
  D.matrix = std::move(M);
  return D;
}

Derivation Derivation::from_matrix_unchecked(Mat M, int n) {
  Derivation D;
  D.n = n;
  D.d = M(2 * n, 2 * n);
  D.matrix = std::move(M);
  return D;
}

Derivation Derivation::zero(int n) {
  return from_matrix_unchecked(Mat::Zero(2 * n + 1, 2 * n + 1), n);
}

double derivation_d(const Derivation& D) { return D.d; }

Vec linear_field_eval(const Derivation& D, const GroupElement& g) {
  if (D.n != g.n) throw std::invalid_argument("linear_field_eval: dimension mismatch");
  const Vec G = g.flat();
  const Vec DG = D.matrix * G;
  const AlgebraElement dg = AlgebraElement::from_flat(DG);
  Vec out = DG;
  out(2 * D.n) += 0.5 * (g.y.dot(dg.x) + g.x.dot(dg.y) - D.d * g.x.dot(g.y));
  return out;
}

GroupElement flow_on_exponentials(const Derivation& D, const AlgebraElement& a, double t) {
  if (D.n != a.n) throw std::invalid_argument("flow_on_exponentials: dimension mismatch");
  const Vec moved = expm(t * D.matrix) * a.flat();
  return group_exp(AlgebraElement::from_flat(moved));
}

}  // namespace heis
