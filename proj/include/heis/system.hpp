#pragma once

#include <string>
#include <vector>

#include "heis/derivation.hpp"

namespace heis {

/// A linear control system on H^n: drift given by the derivation D, controls
/// B_1..B_m right-invariant. D and the controls are expressed in the working
/// symplectic frame; `frame` maps working coordinates to canonical ones.
struct LinearSystem {
  int n = 0;
  Derivation D;
  std::vector<AlgebraElement> controls;
  SymplecticFrame frame;
  double tolerance = kDefaultTolerance;

  int m() const { return static_cast<int>(controls.size()); }
};

LinearSystem make_system(Derivation D, std::vector<AlgebraElement> controls,
                         SymplecticFrame frame, double tolerance = kDefaultTolerance);
LinearSystem make_system(Derivation D, std::vector<AlgebraElement> controls,
                         double tolerance = kDefaultTolerance);

/// Parameters of the restriction of D to a decoupled cell, in the normalized
/// frame of normal_form_decoupled: [[0, b, 0], [c, d, 0], [0, f, d]].
/// `index` is the 1-based control index of the cell.
struct CellParams {
  int index = 0;
  double b = 0.0;
  double c = 0.0;
  double f = 0.0;
};

/// The classical linear system induced on the quotient by the center:
/// vdot = M v + Bmat u over (x_1, y_1, ..., x_n, y_n).
struct QuotientSystem {
  Mat M;
  Mat Bmat;
};

/// Orthonormal basis of the subalgebra generated by the controls: their span,
/// plus R.Z when any pairwise bracket is nonzero (one round suffices in a
/// 2-step nilpotent algebra).
Mat system_subalgebra_h(const LinearSystem& sys);

/// L_0 = LA(DV) with DV = span{D^k B_j} equals the whole algebra.
bool rank_condition(const LinearSystem& sys);

/// The smallest D-invariant subspace containing LA{B_j} is the whole algebra.
bool ad_rank_condition(const LinearSystem& sys);

/// |d| <= tolerance, i.e. the linear field vanishes on the center.
bool is_singular(const LinearSystem& sys);

QuotientSystem quotient_system(const LinearSystem& sys);

/// Conjugates the system by the automorphism P: derivation P D P^{-1},
/// controls P B_j, frame composed with P^{-1}.
LinearSystem transform_system(const LinearSystem& sys, const Mat& P);

/// Normal form for n = m = 1 under the rank condition, via the frame
/// X' = B, Y' = DB, Z' = [B, DB]; in it D = [[0, b, 0], [1, d, 0], [0, f, d]].
struct H1NormalForm {
  double b = 0.0;
  double d = 0.0;
  double f = 0.0;
  SymplecticFrame frame;  // columns in the system's working coordinates
};

H1NormalForm normal_form_h1(const LinearSystem& sys);

/// Decoupled-cell detection. A cell j is decoupled when some symplectic
/// completion with X_i = B_i makes span{B_j, Y_j, Z} D-invariant; that holds
/// iff the smallest D-invariant subspace containing {B_j, Z} fits in three
/// dimensions and is symplectically orthogonal to the other controls. This
/// characterization does not depend on the completion, so it is preserved by
/// automorphisms.
struct DecoupledCells {
  std::vector<int> cells;  // 1-based control indices, increasing
  std::string flag;        // nonempty when the preconditions fail
};

DecoupledCells detect_decoupled_cells(const LinearSystem& sys);

/// Normalized form over the decoupled cells: cells are placed first in the
/// frame, Y_j = DB_j (rescaled), Z rescaled so that c of the first cell is 1.
/// Remaining controls follow as further X positions.
struct DecoupledNormalForm {
  double d = 0.0;
  std::vector<CellParams> cells;
  SymplecticFrame frame;  // columns in the system's working coordinates
  Mat normal_matrix;      // D expressed in that frame
};

DecoupledNormalForm normal_form_decoupled(const LinearSystem& sys,
                                          const std::vector<int>& cells);

}  // namespace heis
