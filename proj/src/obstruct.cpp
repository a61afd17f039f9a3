#include "heis/obstruct.hpp"

#include <cmath>
#include <stdexcept>

#include "heis/rng.hpp"

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

// Reads (d, l, Qhat) off a derivation matrix already expressed in a frame
// whose X positions carry the controls.
void extract_z_dynamics(const Mat& Dmat, int n, double& d, Vec& l, Mat& Qhat) {
  const int q = 2 * n;
  d = Dmat(q, q);
  l = Dmat.row(q).head(q).transpose();
  const Mat M = Dmat.topLeftCorner(q, q);
  Mat A = Mat::Zero(q, q);
  for (int i = 0; i < n; ++i) {
    A.row(2 * i + 1) += 0.5 * M.row(2 * i);      // 1/2 y_i * xdot_i
    A.row(2 * i) += 0.5 * M.row(2 * i + 1);      // 1/2 x_i * ydot_i
    A(2 * i, 2 * i + 1) -= 0.5 * d;              // -(d/2) x_i y_i
  }
  Qhat = 0.5 * (A + A.transpose());
}

Mat betas_in_frame(const LinearSystem& sys, const SymplecticFrame& frame) {
  Mat betas(2 * sys.n, sys.m());
  const auto qr = frame.columns.colPivHouseholderQr();
  for (int j = 0; j < sys.m(); ++j) {
    betas.col(j) = quot(qr.solve(sys.controls[j].flat()));
  }
  return betas;
}

Vec admissibility_residuals(const Mat& S, const Vec& p, const Mat& betas) {
  Vec r(betas.cols());
  for (int j = 0; j < betas.cols(); ++j) {
    r(j) = std::max((S * betas.col(j)).cwiseAbs().maxCoeff(),
                    std::abs(p.dot(betas.col(j))));
  }
  return r;
}

std::optional<ObstructionCertificate> assemble_certificate(
    const LinearSystem& sys, const SymplecticFrame& frame, const Mat& Dmat,
    const Mat& S, const Vec& p, const std::string& stage) {
  ZDynamics z;
  z.frame = frame;
  extract_z_dynamics(Dmat, sys.n, z.d, z.l, z.Qhat);
  z.drift = Dmat.topLeftCorner(2 * sys.n, 2 * sys.n);
  z.control_betas = betas_in_frame(sys, frame);
  std::pair<Vec, Mat> changed;
  try {
    changed = change_of_variable(z, z.drift, S, p, sys.tolerance);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  const auto& [lp, Qp] = changed;
  const double psd_tol = 1e3 * sys.tolerance * std::max(1.0, Qp.cwiseAbs().maxCoeff());
  if (min_eigenvalue(Qp) < -psd_tol) return std::nullopt;
  const auto mu = bounded_below(lp, Qp, sys.tolerance);
  if (!mu) return std::nullopt;
  ObstructionCertificate cert;
  cert.S = S;
  cert.p = p;
  cert.lprime = lp;
  cert.Qprime = Qp;
  cert.mu = *mu;
  cert.frame = frame;
  cert.admissibility_residuals = admissibility_residuals(S, p, z.control_betas);
  cert.stage = stage;
  if (!verify_certificate(sys, cert)) return std::nullopt;
  return cert;
}

}  // namespace

ZDynamics z_dynamics(const LinearSystem& sys) {
  const int n = sys.n;
  const int dim = 2 * n + 1;
  Mat B(dim, sys.m());
  for (int j = 0; j < sys.m(); ++j) B.col(j) = sys.controls[j].flat();
  const Mat span = orthonormal_basis(B, sys.tolerance);
  if (in_span(span, Vec::Unit(dim, dim - 1), sys.tolerance)) {
    throw std::invalid_argument("z_dynamics: Z lies in the span of the controls");
  }
  for (int i = 0; i < sys.m(); ++i) {
    for (int j = i + 1; j < sys.m(); ++j) {
      const double l = symplectic_form(sys.controls[i], sys.controls[j]);
      if (std::abs(l) > sys.tolerance *
                            std::max(1.0, sys.controls[i].flat().norm() *
                                              sys.controls[j].flat().norm())) {
        throw std::invalid_argument("z_dynamics: controls do not commute");
      }
    }
  }
  // Independent-mod-center representatives, kept in declaration order.
  std::vector<AlgebraElement> reps;
  Mat picked(2 * n, 0);
  for (int j = 0; j < sys.m(); ++j) {
    Mat trial(2 * n, picked.cols() + 1);
    trial << picked, quot(sys.controls[j].flat());
    if (numerical_rank(trial, sys.tolerance) == trial.cols()) {
      picked = trial;
      reps.push_back(sys.controls[j]);
    }
  }
  if (reps.empty()) {
    throw std::invalid_argument("z_dynamics: all controls are central");
  }

  ZDynamics z;
  z.frame = complete_symplectic_frame({}, reps, 1.0, sys.tolerance);
  const Mat Dmat =
      z.frame.columns.colPivHouseholderQr().solve(sys.D.matrix * z.frame.columns);
  extract_z_dynamics(Dmat, n, z.d, z.l, z.Qhat);
  z.drift = Dmat.topLeftCorner(2 * n, 2 * n);
  z.control_betas = betas_in_frame(sys, z.frame);
  return z;
}

std::optional<double> bounded_below(const Vec& l, const Mat& Qhat, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Qhat);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double floor_tol = 1e3 * tol * scale;
  double mu = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double proj = es.eigenvectors().col(i).dot(l);
    if (ev(i) < -floor_tol) return std::nullopt;  // not PSD
    if (std::abs(ev(i)) <= floor_tol) {
      // Null direction: l must vanish on it or the polynomial is unbounded.
      if (std::abs(proj) > floor_tol * std::max(1.0, l.norm())) return std::nullopt;
    } else {
      mu -= 0.25 * proj * proj / ev(i);
    }
  }
  return mu;
}

std::pair<Vec, Mat> change_of_variable(const ZDynamics& z, const Mat& M, const Mat& S,
                                       const Vec& p, double tol) {
  const Vec res = admissibility_residuals(S, p, z.control_betas);
  const double scale =
      std::max(1.0, std::max(S.cwiseAbs().maxCoeff(), p.cwiseAbs().maxCoeff()));
  if (res.size() > 0 && res.maxCoeff() > 1e3 * tol * scale) {
    throw std::invalid_argument("change_of_variable: (S, p) is not admissible");
  }
  Mat Qp = z.Qhat + 0.5 * (S * M + M.transpose() * S) - 0.5 * z.d * S;
  Vec lp = z.l + M.transpose() * p - z.d * p;
  return {std::move(lp), std::move(Qp)};
}

std::optional<ObstructionCertificate> search_obstruction(const LinearSystem& sys,
                                                         int budget,
                                                         std::uint64_t seed) {
  if (is_singular(sys)) {
    throw std::invalid_argument("search_obstruction: regular system required (d != 0)");
  }
  const int n = sys.n;
  const int q = 2 * n;
  const ZDynamics z = z_dynamics(sys);  // throws if Z in span of controls

  // Stage (a): the trivial change of variable.
  if (auto cert = assemble_certificate(
          sys, z.frame,
          z.frame.columns.colPivHouseholderQr().solve(sys.D.matrix * z.frame.columns),
          Mat::Zero(q, q), Vec::Zero(q), "trivial")) {
    return cert;
  }

  // Stage (b): complete-the-square over decoupled cells, with the linear
  // correction that keeps l' on the range of Q' at boundary cells.
  const DecoupledCells det = detect_decoupled_cells(sys);
  if (!det.cells.empty()) {
    try {
      const DecoupledNormalForm nf = normal_form_decoupled(sys, det.cells);
      Mat S = Mat::Zero(q, q);
      Vec p = Vec::Zero(q);
      bool cells_ok = true;
      for (size_t k = 0; k < nf.cells.size(); ++k) {
        const CellParams& cp = nf.cells[k];
        if (cp.c <= 0.0) cells_ok = false;  // a negative c makes Q' indefinite
        S(2 * k + 1, 2 * k + 1) = nf.d / (2.0 * cp.c);
        p(2 * k + 1) = 2.0 * cp.f / nf.d;
      }
      if (cells_ok) {
        if (auto cert = assemble_certificate(sys, nf.frame, nf.normal_matrix, S, p,
                                             "cell-complete-square")) {
          return cert;
        }
      }
    } catch (const std::invalid_argument&) {
      // per-cell rank failure; fall through to the numeric stage
    }
  }

  // Stage (c): maximize the smallest eigenvalue of Q'(S) over the admissible
  // subspace (a concave function of S), then fix l' through p.
  const Mat Dmat =
      z.frame.columns.colPivHouseholderQr().solve(sys.D.matrix * z.frame.columns);
  const Mat M = z.drift;
  // Admissible S = N C N^T, admissible p = N pq, with N spanning the
  // orthogonal complement of the control directions.
  const Mat beta_basis = orthonormal_basis(z.control_betas, sys.tolerance);
  const Mat N = orthonormal_basis(
      Mat::Identity(q, q) - beta_basis * beta_basis.transpose(), sys.tolerance);
  const int k = static_cast<int>(N.cols());
  if (k == 0) return std::nullopt;

  const double q_scale = std::max(1.0, z.Qhat.cwiseAbs().maxCoeff());
  const int iters = 500;
  for (int start = 0; start < budget; ++start) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(start));
    Mat C = Mat::Zero(k, k);
    if (start > 0) {
      for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) {
          C(a, b) = C(b, a) = rng.uniform(-2.0, 2.0) * q_scale;
        }
      }
    }
    auto lambda_min_of = [&](const Mat& Cc) {
      const Mat S = N * Cc * N.transpose();
      const Mat Qp = z.Qhat + 0.5 * (S * M + M.transpose() * S) - 0.5 * z.d * S;
      return Qp;
    };
    double best = min_eigenvalue(lambda_min_of(C));
    Mat bestC = C;
    for (int it = 0; it < iters; ++it) {
      const Mat S = N * C * N.transpose();
      const Mat Qp = z.Qhat + 0.5 * (S * M + M.transpose() * S) - 0.5 * z.d * S;
      Eigen::SelfAdjointEigenSolver<Mat> es(Qp);
      const double lmin = es.eigenvalues()(0);
      if (lmin > best) {
        best = lmin;
        bestC = C;
      }
      const Vec u = es.eigenvectors().col(0);
      const Vec w = M * u - 0.5 * z.d * u;
      const Mat G = 0.5 * N.transpose() * (u * w.transpose() + w * u.transpose()) * N;
      const double gnorm = G.norm();
      if (gnorm < 1e-14) break;
      const double step = 0.5 * q_scale / (1.0 + 0.05 * it);
      C += (step / gnorm) * G;
    }
    const Mat S = N * bestC * N.transpose();
    const Mat Qp = z.Qhat + 0.5 * (S * M + M.transpose() * S) - 0.5 * z.d * S;
    const double psd_tol = 1e3 * sys.tolerance * std::max(1.0, Qp.cwiseAbs().maxCoeff());
    if (min_eigenvalue(Qp) < -psd_tol) continue;

    // Fix l': choose admissible p so that l' vanishes on the null space of Q'.
    Eigen::SelfAdjointEigenSolver<Mat> es(Qp);
    Mat null_dirs(q, 0);
    for (int i = 0; i < q; ++i) {
      if (std::abs(es.eigenvalues()(i)) <= psd_tol) {
        null_dirs.conservativeResize(Eigen::NoChange, null_dirs.cols() + 1);
        null_dirs.col(null_dirs.cols() - 1) = es.eigenvectors().col(i);
      }
    }
    Vec p = Vec::Zero(q);
    if (null_dirs.cols() > 0) {
      const Mat proj = null_dirs * null_dirs.transpose();
      const Mat A = proj * (M.transpose() - z.d * Mat::Identity(q, q)) * N;
      const Vec rhs = -proj * z.l;
      const Vec pq = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
      p = N * pq;
    }
    if (auto cert = assemble_certificate(sys, z.frame, Dmat, S, p, "eigenvalue-search")) {
      return cert;
    }
  }
  return std::nullopt;
}

bool verify_certificate(const LinearSystem& sys, const ObstructionCertificate& cert) {
  const int q = 2 * sys.n;
  if (cert.frame.n != sys.n) return false;
  if (cert.S.rows() != q || cert.S.cols() != q || cert.p.size() != q) return false;
  if (!is_symplectic_frame(cert.frame, std::max(1e-9, sys.tolerance) * 1e3)) return false;

  ZDynamics z;
  z.frame = cert.frame;
  const Mat Dmat =
      cert.frame.columns.colPivHouseholderQr().solve(sys.D.matrix * cert.frame.columns);
  extract_z_dynamics(Dmat, sys.n, z.d, z.l, z.Qhat);
  z.drift = Dmat.topLeftCorner(q, q);
  z.control_betas = betas_in_frame(sys, cert.frame);
  if (std::abs(z.d) <= sys.tolerance) return false;  // regular systems only

  std::pair<Vec, Mat> changed;
  try {
    changed = change_of_variable(z, z.drift, cert.S, cert.p, sys.tolerance);
  } catch (const std::invalid_argument&) {
    return false;
  }
  const auto& [lp, Qp] = changed;
  const double cmp_tol =
      1e-7 * std::max(1.0, std::max(Qp.cwiseAbs().maxCoeff(), lp.cwiseAbs().maxCoeff()));
  if ((lp - cert.lprime).cwiseAbs().maxCoeff() > cmp_tol) return false;
  if ((Qp - cert.Qprime).cwiseAbs().maxCoeff() > cmp_tol) return false;

  const double psd_tol = 1e3 * sys.tolerance * std::max(1.0, Qp.cwiseAbs().maxCoeff());
  if (min_eigenvalue(Qp) < -psd_tol) return false;
  const auto mu = bounded_below(lp, Qp, sys.tolerance);
  if (!mu) return false;
  if (std::abs(*mu - cert.mu) > 1e-6 * std::max(1.0, std::abs(cert.mu))) return false;
  return true;
}

}  // namespace heis
