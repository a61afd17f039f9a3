#pragma once

#include "heis/algebra.hpp"

namespace heis {

enum class DerivationCheck {
  kStructural,  // block conditions: center column, traces, adjugate pattern
  kLeibniz,     // D[e_i, e_j] = [D e_i, e_j] + [e_i, D e_j] on all basis pairs
};

/// Structural characterization: a (2n+1)x(2n+1) matrix in a symplectic frame
/// is a derivation iff its last column is (0,...,0,d), every diagonal 2x2
/// block has trace d, and each strictly-upper block equals minus the adjugate
/// of the mirrored lower block. The Leibniz path is an independent oracle;
/// debug builds cross-check the two.
bool is_derivation(const Mat& M, int n, double tol = kDefaultTolerance,
                   DerivationCheck check = DerivationCheck::kStructural);

bool is_derivation_structural(const Mat& M, int n, double tol = kDefaultTolerance);
bool is_derivation_leibniz(const Mat& M, int n, double tol = kDefaultTolerance);

/// A derivation of h^n, expressed in a symplectic frame. The field d caches
/// the center eigenvalue (D Z = d Z).
struct Derivation {
  int n = 0;
  Mat matrix;
  double d = 0.0;

  /// Validates the structural conditions; throws std::invalid_argument with
  /// the failing condition named.
  static Derivation from_matrix(Mat M, int n, double tol = kDefaultTolerance);

  /// No validation; for values produced by exact transformations.
  static Derivation from_matrix_unchecked(Mat M, int n);

  static Derivation zero(int n);
};

double derivation_d(const Derivation& D);

/// Value of the linear vector field at g = I + G:
///   X(g) = DG + 1/2 (<y_G, x_DG> + <x_G, y_DG> - d <x_G, y_G>) Z,
/// returned as a flat tangent vector (xdot_1, ydot_1, ..., zdot).
Vec linear_field_eval(const Derivation& D, const GroupElement& g);

/// Closed-form flow through exp: phi_t(exp a) = exp(e^{tD} a).
GroupElement flow_on_exponentials(const Derivation& D, const AlgebraElement& a, double t);

}  // namespace heis
