#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "heis/system.hpp"

namespace heis {

/// The control-independent dynamics of the last coordinate,
///   zdot = d z + l(v) + v^T Qhat v  over v = (x_1, y_1, ..., x_n, y_n),
/// expressed in a symplectic frame whose X positions carry the controls.
struct ZDynamics {
  double d = 0.0;
  Vec l;      // length 2n
  Mat Qhat;   // 2n x 2n, symmetric
  SymplecticFrame frame;  // columns in the system's working coordinates
  Mat drift;  // quotient drift in the frame, 2n x 2n
  Mat control_betas;  // (x, y)-parts of the controls in the frame, 2n x m
};

/// Constructs the frame (controls placed as X_i via the commuting completion)
/// and reads (d, l, Qhat) off the transformed derivation. Throws when Z lies
/// in the span of the controls or the controls do not commute.
ZDynamics z_dynamics(const LinearSystem& sys);

/// Finite minimum of f(v) = l^T v + v^T Qhat v, when it exists: Qhat must be
/// positive semidefinite and l orthogonal to its null space; then
/// mu = -1/4 l^T pinv(Qhat) l. Returns nullopt otherwise.
std::optional<double> bounded_below(const Vec& l, const Mat& Qhat,
                                    double tol = kDefaultTolerance);

/// Effect of the admissible change w = z + 1/2 v^T S v + p^T v on the z
/// dynamics, with quotient drift M:
///   Qhat' = Qhat + 1/2 (S M + M^T S) - (d/2) S,   l' = l + M^T p - d p.
/// Throws when (S, p) violates admissibility (S beta_j = 0, p . beta_j = 0).
std::pair<Vec, Mat> change_of_variable(const ZDynamics& z, const Mat& M, const Mat& S,
                                       const Vec& p, double tol = kDefaultTolerance);

/// Non-controllability certificate: an admissible change of variable under
/// which the z dynamics is bounded below, so the level set w = -mu/d can be
/// crossed in only one direction. S, p and the derived data are relative to
/// `frame` (columns in the system's working coordinates).
struct ObstructionCertificate {
  Mat S;
  Vec p;
  Vec lprime;
  Mat Qprime;
  double mu = 0.0;
  SymplecticFrame frame;
  Vec admissibility_residuals;  // per control: max(|S beta_j|, |p . beta_j|)
  std::string stage;            // "trivial", "cell-complete-square", "eigenvalue-search"
};

/// Searches the admissible (S, p) family for a certificate, in three stages:
/// the trivial change, the closed-form complete-the-square over decoupled
/// cells, and a multi-start eigenvalue ascent over the admissible subspace.
/// `budget` bounds the number of ascent starts; the result is deterministic
/// for a fixed seed. A nullopt result is not a controllability proof.
std::optional<ObstructionCertificate> search_obstruction(const LinearSystem& sys,
                                                         int budget = 64,
                                                         std::uint64_t seed = 0);

/// Recomputes everything in the certificate from scratch (frame validity,
/// admissibility, the transformed pair, semidefiniteness, the minimum) and
/// compares with the stored values.
bool verify_certificate(const LinearSystem& sys, const ObstructionCertificate& cert);

}  // namespace heis
