#pragma once

#include <utility>
#include <vector>

#include "heis/linalg.hpp"

namespace heis {

/// Default absolute tolerance for all numeric comparisons.
inline constexpr double kDefaultTolerance = 1e-9;

/// Element of the Heisenberg algebra h^n in a fixed symplectic frame.
/// Flattened coordinate order is (x_1, y_1, ..., x_n, y_n, z).
struct AlgebraElement {
  int n = 0;
  Vec x;
  Vec y;
  double z = 0.0;

  AlgebraElement() = default;
  AlgebraElement(int n_, Vec x_, Vec y_, double z_);

  static AlgebraElement zero(int n);
  static AlgebraElement basis_x(int n, int i);  // X_{i+1}, 0-based i
  static AlgebraElement basis_y(int n, int i);  // Y_{i+1}
  static AlgebraElement basis_z(int n);         // Z
  static AlgebraElement from_flat(const Vec& v);

  Vec flat() const;

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator*(double s) const;
};

inline AlgebraElement operator*(double s, const AlgebraElement& a) { return a * s; }

/// Element g = I + G of the group H^n, same coordinate layout as the algebra.
struct GroupElement {
  int n = 0;
  Vec x;
  Vec y;
  double z = 0.0;

  GroupElement() = default;
  GroupElement(int n_, Vec x_, Vec y_, double z_);

  static GroupElement identity(int n);
  static GroupElement from_flat(const Vec& v);

  Vec flat() const;
};

/// Lie bracket. The result is always central: [a, b] = l(a, b) Z.
AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);

/// The skew-symmetric form l with [a, b] = l(a, b) Z, relative to the
/// canonical center generator. Its kernel is exactly R.Z.
double symplectic_form(const AlgebraElement& a, const AlgebraElement& b);

/// exp(A) = I + A + (1/2)<x_A, y_A> Z.
GroupElement group_exp(const AlgebraElement& a);

/// log(g) = G - (1/2)G^2, the inverse of group_exp.
AlgebraElement group_log(const GroupElement& g);

/// (I+G)(I+H) = I + G + H + <y_G, x_H> Z.
GroupElement group_multiply(const GroupElement& g, const GroupElement& h);

GroupElement group_inverse(const GroupElement& g);

/// A basis (X_1, Y_1, ..., X_n, Y_n, Z') with [X_i, Y_i] = Z' and all other
/// basis brackets zero. Column k of `columns` holds the canonical coordinates
/// of the k-th basis element; `zscale` relates Z' to the canonical Z.
struct SymplecticFrame {
  int n = 0;
  Mat columns;
  double zscale = 1.0;

  static SymplecticFrame canonical(int n);
  static SymplecticFrame from_columns(Mat cols);

  AlgebraElement column_element(int k) const;
  /// Coordinates of a canonical-coordinate vector in this frame.
  Vec to_frame(const Vec& canonical_coords) const;
  Vec from_frame(const Vec& frame_coords) const;
  /// Frame whose columns are this->columns * other.columns.
  SymplecticFrame compose(const SymplecticFrame& other) const;
};

/// Checks the bracket table of the columns against [X_i, Y_i] = Z' (the last
/// column), all other pairs zero, and that the matrix is invertible.
bool is_symplectic_frame(const SymplecticFrame& f, double tol = kDefaultTolerance);

enum class CompletionMode {
  kSingle = 1,     // one X not in the derived algebra, placed as X_1
  kPair = 2,       // a pair with [X, Y] != 0, placed as (X_1, Y_1); rescales Z
  kCommuting = 3,  // commuting family, independent mod center, placed as X_1..X_m
};

/// Completes the given elements to a full symplectic frame (symplectic
/// Gram-Schmidt with greatest-|l| pivoting). Throws std::invalid_argument
/// when the mode's hypothesis fails.
SymplecticFrame complete_symplectic_basis(const std::vector<AlgebraElement>& partial,
                                          CompletionMode mode,
                                          double tol = kDefaultTolerance);

/// Generalized completion: `pairs` are already-paired (X_i, Y_i) with
/// l(X_i, Y_i) = zscale and all cross brackets zero; `singles` get partners.
/// Pairs come first in the resulting frame, then singles, then free pairs.
SymplecticFrame complete_symplectic_frame(
    const std::vector<std::pair<AlgebraElement, AlgebraElement>>& pairs,
    const std::vector<AlgebraElement>& singles, double zscale,
    double tol = kDefaultTolerance);

/// True iff P[a, b] = [Pa, Pb] on all basis pairs and P is invertible.
/// Equivalently, P maps the canonical frame to a symplectic frame.
bool is_automorphism(const Mat& P, double tol = kDefaultTolerance);

}  // namespace heis
