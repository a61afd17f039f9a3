#include "heis/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heis {

namespace {

Vec quot(const Vec& flat) { return flat.head(flat.size() - 1); }

double l_quot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; 2 * i + 1 < a.size(); ++i) {
    s += a(2 * i) * b(2 * i + 1) - a(2 * i + 1) * b(2 * i);
  }
  return s;
}

Mat controls_matrix(const LinearSystem& sys) {
  Mat B(2 * sys.n + 1, sys.m());
  for (int j = 0; j < sys.m(); ++j) B.col(j) = sys.controls[j].flat();
  return B;
}

bool controls_commute(const LinearSystem& sys) {
  for (int i = 0; i < sys.m(); ++i) {
    for (int j = i + 1; j < sys.m(); ++j) {
      const double l = symplectic_form(sys.controls[i], sys.controls[j]);
      const double scale = std::max(
          1.0, sys.controls[i].flat().norm() * sys.controls[j].flat().norm());
      if (std::abs(l) > sys.tolerance * scale) return false;
    }
  }
  return true;
}

bool controls_independent_mod_center(const LinearSystem& sys) {
  Mat Q(2 * sys.n, sys.m());
  for (int j = 0; j < sys.m(); ++j) Q.col(j) = quot(sys.controls[j].flat());
  return numerical_rank(Q, sys.tolerance) == sys.m();
}

Mat conjugate(const Mat& M, const Mat& frame_cols) {
  return frame_cols.colPivHouseholderQr().solve(M * frame_cols);
}

}  // namespace

LinearSystem make_system(Derivation D, std::vector<AlgebraElement> controls,
                         SymplecticFrame frame, double tolerance) {
  LinearSystem sys;
  sys.n = D.n;
  if (controls.empty()) throw std::invalid_argument("system needs at least one control");
  for (const auto& b : controls) {
    if (b.n != D.n) throw std::invalid_argument("control dimension mismatch");
  }
  if (frame.n != D.n) throw std::invalid_argument("frame dimension mismatch");
  if (!is_derivation_structural(D.matrix, D.n, std::max(tolerance, 1e-12))) {
    throw std::invalid_argument("system drift is not a derivation");
  }
  sys.D = std::move(D);
  sys.controls = std::move(controls);
  sys.frame = std::move(frame);
  sys.tolerance = tolerance;
  return sys;
}

LinearSystem make_system(Derivation D, std::vector<AlgebraElement> controls,
                         double tolerance) {
  const int n = D.n;
  return make_system(std::move(D), std::move(controls), SymplecticFrame::canonical(n),
                     tolerance);
}

Mat system_subalgebra_h(const LinearSystem& sys) {
  Mat B = controls_matrix(sys);
  if (!controls_commute(sys)) {
    Mat ext(B.rows(), B.cols() + 1);
    ext << B, Vec::Unit(B.rows(), B.rows() - 1);
    return orthonormal_basis(ext, sys.tolerance);
  }
  return orthonormal_basis(B, sys.tolerance);
}

bool rank_condition(const LinearSystem& sys) {
  const int dim = 2 * sys.n + 1;
  Mat dv = invariant_closure(sys.D.matrix, controls_matrix(sys), dim, sys.tolerance);
  // One bracket round: 2-step nilpotency means brackets only ever add R.Z.
  bool nonzero_bracket = false;
  for (int i = 0; i < dv.cols() && !nonzero_bracket; ++i) {
    for (int j = i + 1; j < dv.cols() && !nonzero_bracket; ++j) {
      if (std::abs(l_quot(quot(dv.col(i)), quot(dv.col(j)))) > sys.tolerance) {
        nonzero_bracket = true;
      }
    }
  }
  if (nonzero_bracket) {
    Mat ext(dim, dv.cols() + 1);
    ext << dv, Vec::Unit(dim, dim - 1);
    dv = orthonormal_basis(ext, sys.tolerance);
  }
  return dv.cols() == dim;
}

bool ad_rank_condition(const LinearSystem& sys) {
  const int dim = 2 * sys.n + 1;
  const Mat h = system_subalgebra_h(sys);
  const Mat dh = invariant_closure(sys.D.matrix, h, dim, sys.tolerance);
  return dh.cols() == dim;
}

bool is_singular(const LinearSystem& sys) { return std::abs(sys.D.d) <= sys.tolerance; }

QuotientSystem quotient_system(const LinearSystem& sys) {
  QuotientSystem q;
  q.M = sys.D.matrix.topLeftCorner(2 * sys.n, 2 * sys.n);
  q.Bmat = Mat(2 * sys.n, sys.m());
  for (int j = 0; j < sys.m(); ++j) q.Bmat.col(j) = quot(sys.controls[j].flat());
  return q;
}

LinearSystem transform_system(const LinearSystem& sys, const Mat& P) {
  if (!is_automorphism(P, sys.tolerance)) {
    throw std::invalid_argument("transform_system: P is not an automorphism");
  }
  const Mat Pinv = P.colPivHouseholderQr().solve(Mat::Identity(P.rows(), P.cols()));
  Mat Dnew = P * sys.D.matrix * Pinv;
  std::vector<AlgebraElement> controls;
  controls.reserve(sys.controls.size());
  for (const auto& b : sys.controls) {
    controls.push_back(AlgebraElement::from_flat(P * b.flat()));
  }
  return make_system(Derivation::from_matrix_unchecked(std::move(Dnew), sys.n),
                     std::move(controls),
                     sys.frame.compose(SymplecticFrame::from_columns(Pinv)),
                     sys.tolerance);
}

H1NormalForm normal_form_h1(const LinearSystem& sys) {
  if (sys.n != 1 || sys.m() != 1) {
    throw std::invalid_argument("normal_form_h1: requires n = 1, m = 1");
  }
  if (!rank_condition(sys)) {
    throw std::invalid_argument("normal_form_h1: rank condition fails");
  }
  const Vec B = sys.controls[0].flat();
  const Vec DB = sys.D.matrix * B;
  const double c = l_quot(quot(B), quot(DB));
  if (std::abs(c) <= sys.tolerance * std::max(1.0, B.norm() * DB.norm())) {
    throw std::invalid_argument("normal_form_h1: [B, DB] = 0");
  }
  Mat cols(3, 3);
  cols.col(0) = B;
  cols.col(1) = DB;
  cols.col(2) = Vec::Zero(3);
  cols(2, 2) = c;
  SymplecticFrame frame = SymplecticFrame::from_columns(std::move(cols));
  const Mat Dnf = conjugate(sys.D.matrix, frame.columns);
  H1NormalForm nf;
  nf.b = Dnf(0, 1);
  nf.d = Dnf(1, 1);
  nf.f = Dnf(2, 1);
  nf.frame = std::move(frame);
  return nf;
}

DecoupledCells detect_decoupled_cells(const LinearSystem& sys) {
  DecoupledCells out;
  const int n = sys.n;
  const int m = sys.m();
  if (m > n) {
    throw std::invalid_argument("detect_decoupled_cells: more controls than cells (m > n)");
  }
  if (!controls_commute(sys)) {
    out.flag = "non-commuting controls";
    return out;
  }
  if (!controls_independent_mod_center(sys)) {
    out.flag = "controls dependent modulo the center";
    return out;
  }
  const int dim = 2 * n + 1;
  for (int j = 0; j < m; ++j) {
    const Vec B = sys.controls[j].flat();
    Mat seed(dim, 2);
    seed.col(0) = B;
    seed.col(1) = Vec::Unit(dim, dim - 1);
    const Mat U = invariant_closure(sys.D.matrix, seed, dim, sys.tolerance);
    if (U.cols() > 3) continue;

    // The cell subspace must commute with every other control.
    bool compatible = true;
    for (int i = 0; i < m && compatible; ++i) {
      if (i == j) continue;
      const Vec Bi = sys.controls[i].flat();
      for (int k = 0; k < U.cols(); ++k) {
        const double l = l_quot(quot(Bi), quot(U.col(k)));
        if (std::abs(l) > sys.tolerance * std::max(1.0, Bi.norm())) {
          compatible = false;
          break;
        }
      }
    }
    if (!compatible) continue;

    if (n == 1) {  // span{X_1, Y_1, Z} is the whole algebra
      out.cells.push_back(j + 1);
      continue;
    }
    if (U.cols() == 3) {
      // Need a symplectic partner inside U, i.e. l(B_j, DB_j) != 0.
      const Vec DB = sys.D.matrix * B;
      if (std::abs(l_quot(quot(B), quot(DB))) >
          sys.tolerance * std::max(1.0, B.norm() * DB.norm())) {
        out.cells.push_back(j + 1);
      }
      continue;
    }
    // Degenerate case: DB_j in span{B_j, Z}. A partner must span a
    // D-invariant quotient plane with B_j, which can only come from a real
    // eigenvalue of the quotient drift.
    const Mat Mq = sys.D.matrix.topLeftCorner(2 * n, 2 * n);
    const Vec bq = quot(B);
    Eigen::EigenSolver<Mat> es(Mq);
    bool found = false;
    for (int e = 0; e < es.eigenvalues().size() && !found; ++e) {
      if (std::abs(es.eigenvalues()(e).imag()) > 1e-9) continue;
      const double lambda = es.eigenvalues()(e).real();
      // Solutions (y, beta) of (Mq - lambda I) y = beta * bq.
      Mat A(2 * n, 2 * n + 1);
      A << Mq - lambda * Mat::Identity(2 * n, 2 * n), -bq;
      Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
      Mat null_basis(2 * n + 1, 0);
      for (int k = 0; k < svd.matrixV().cols(); ++k) {
        const double sv = k < svd.singularValues().size() ? svd.singularValues()(k) : 0.0;
        if (sv <= 1e-9 * std::max(1.0, svd.singularValues()(0))) {
          null_basis.conservativeResize(Eigen::NoChange, null_basis.cols() + 1);
          null_basis.col(null_basis.cols() - 1) = svd.matrixV().col(k);
        }
      }
      if (null_basis.cols() == 0) continue;
      // Within the solution space, require l(B_i, y) = 0 for i != j and
      // l(B_j, y) != 0 to be attainable.
      Mat C(std::max(m - 1, 0), 2 * n + 1);
      int r = 0;
      for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        Vec phi = Vec::Zero(2 * n + 1);
        const Vec bi = quot(sys.controls[i].flat());
        for (int t = 0; t < n; ++t) {
          phi(2 * t) = -bi(2 * t + 1);
          phi(2 * t + 1) = bi(2 * t);
        }
        C.row(r++) = phi.transpose();
      }
      Mat feasible = null_basis;
      if (C.rows() > 0) {
        Eigen::JacobiSVD<Mat> csvd(C * null_basis, Eigen::ComputeFullV);
        Mat inner(null_basis.cols(), 0);
        for (int k = 0; k < csvd.matrixV().cols(); ++k) {
          const double sv =
              k < csvd.singularValues().size() ? csvd.singularValues()(k) : 0.0;
          const double top =
              csvd.singularValues().size() ? csvd.singularValues()(0) : 0.0;
          if (sv <= 1e-9 * std::max(1.0, top)) {
            inner.conservativeResize(Eigen::NoChange, inner.cols() + 1);
            inner.col(inner.cols() - 1) = csvd.matrixV().col(k);
          }
        }
        feasible = null_basis * inner;
      }
      Vec phi_j = Vec::Zero(2 * n + 1);
      for (int t = 0; t < n; ++t) {
        phi_j(2 * t) = -bq(2 * t + 1);
        phi_j(2 * t + 1) = bq(2 * t);
      }
      if (feasible.cols() > 0 && (phi_j.transpose() * feasible).norm() > 1e-9) {
        found = true;
      }
    }
    if (found) out.cells.push_back(j + 1);
  }
  return out;
}

DecoupledNormalForm normal_form_decoupled(const LinearSystem& sys,
                                          const std::vector<int>& cells) {
  if (cells.empty()) {
    throw std::invalid_argument("normal_form_decoupled: no decoupled cells");
  }
  if (!controls_commute(sys) || !controls_independent_mod_center(sys)) {
    throw std::invalid_argument("normal_form_decoupled: controls must commute and be "
                                "independent modulo the center");
  }
  const int n = sys.n;
  const int m = sys.m();
  std::vector<bool> is_cell(m, false);
  for (int j : cells) {
    if (j < 1 || j > m) throw std::invalid_argument("normal_form_decoupled: bad cell index");
    is_cell[j - 1] = true;
  }

  // c of each cell in current-frame-Z units; the first cell sets the rescale.
  std::vector<double> chat(m, 0.0);
  for (int j : cells) {
    const Vec B = sys.controls[j - 1].flat();
    const Vec DB = sys.D.matrix * B;
    chat[j - 1] = l_quot(quot(B), quot(DB));
    if (std::abs(chat[j - 1]) <= sys.tolerance * std::max(1.0, B.norm() * DB.norm())) {
      throw std::invalid_argument("normal_form_decoupled: per-cell rank condition fails "
                                  "(c_j = 0)");
    }
  }
  const double zscale = chat[cells.front() - 1];

  std::vector<std::pair<AlgebraElement, AlgebraElement>> pairs;
  std::vector<AlgebraElement> singles;
  std::vector<int> order;  // original 1-based control index per frame position
  for (int j : cells) {
    const Vec B = sys.controls[j - 1].flat();
    const Vec DB = sys.D.matrix * B;
    pairs.emplace_back(AlgebraElement::from_flat(B),
                       AlgebraElement::from_flat((zscale / chat[j - 1]) * DB));
    order.push_back(j);
  }
  for (int j = 1; j <= m; ++j) {
    if (!is_cell[j - 1]) {
      singles.push_back(sys.controls[j - 1]);
      order.push_back(j);
    }
  }

  SymplecticFrame frame = complete_symplectic_frame(pairs, singles, zscale, sys.tolerance);
  const Mat Dnf = conjugate(sys.D.matrix, frame.columns);

  DecoupledNormalForm nf;
  nf.d = Dnf(2 * n, 2 * n);
  for (size_t k = 0; k < cells.size(); ++k) {
    CellParams p;
    p.index = order[k];
    p.b = Dnf(2 * k, 2 * k + 1);
    p.c = Dnf(2 * k + 1, 2 * k);
    p.f = Dnf(2 * n, 2 * k + 1);
    nf.cells.push_back(p);
  }
  nf.frame = std::move(frame);
  nf.normal_matrix = Dnf;
  return nf;
}

}  // namespace heis
