#include "heis/decide.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace heis {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool controls_linearly_independent(const LinearSystem& sys) {
  Mat B(2 * sys.n + 1, sys.m());
  for (int j = 0; j < sys.m(); ++j) B.col(j) = sys.controls[j].flat();
  return numerical_rank(B, sys.tolerance) == sys.m();
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

bool z_in_control_span(const LinearSystem& sys) {
  const int dim = 2 * sys.n + 1;
  Mat B(dim, sys.m());
  for (int j = 0; j < sys.m(); ++j) B.col(j) = sys.controls[j].flat();
  return in_span(orthonormal_basis(B, sys.tolerance), Vec::Unit(dim, dim - 1),
                 sys.tolerance);
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kControllable: return "Controllable";
    case Outcome::kNotControllable: return "NotControllable";
    case Outcome::kUnknown: return "Unknown";
  }
  return "?";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kRankFail: return "RankFail";
    case Provenance::kThm2: return "Thm2";
    case Provenance::kThm3: return "Thm3";
    case Provenance::kThm45Certificate: return "Thm4/5-certificate";
    case Provenance::kThm6: return "Thm6";
    case Provenance::kThm7: return "Thm7";
    case Provenance::kCor1: return "Cor1";
    case Provenance::kThm8: return "Thm8";
    case Provenance::kThm9Thm10: return "Thm9/Thm10";
    case Provenance::kThm10: return "Thm10";
    case Provenance::kConjectureOnly: return "ConjectureOnly";
    case Provenance::kNone: return "None";
  }
  return "?";
}

bool cell_controllable(const CellParams& p, double d, double tol) {
  if (std::abs(p.c) <= tol) {
    throw std::invalid_argument("cell_controllable: c = 0");
  }
  if (d * d + 4.0 * p.b * p.c < 0.0) return true;  // non-real quotient eigenvalues
  return std::abs(d) <= tol && std::abs(p.f) > tol;
}

Verdict decide(const LinearSystem& sys, const DecideOptions& opts) {
  Verdict v;
  const double tol = sys.tolerance;

  // 1. The rank condition is necessary for controllability of the analytic
  //    system.
  if (!rank_condition(sys)) {
    v.outcome = Outcome::kNotControllable;
    v.provenance = Provenance::kRankFail;
    v.notes = "system Lie algebra is a proper subalgebra";
    return v;
  }

  // 2. m >= n+1 independent controls. Checked ahead of the Z-membership
  //    branch: such families always generate Z, so this branch would
  //    otherwise be unreachable.
  if (sys.m() >= sys.n + 1 && controls_linearly_independent(sys)) {
    v.outcome = Outcome::kControllable;
    v.provenance = Provenance::kCor1;
    v.exact_time = true;
    v.notes = "m >= n + 1 independent controls";
    return v;
  }

  // 3. Z in the algebra generated by the controls.
  {
    const Mat h = system_subalgebra_h(sys);
    if (in_span(h, Vec::Unit(2 * sys.n + 1, 2 * sys.n), tol)) {
      v.outcome = Outcome::kControllable;
      v.provenance = Provenance::kThm7;
      v.exact_time = true;
      v.notes = "Z lies in the algebra generated by the controls";
      return v;
    }
  }

  // 4. The H^1 dichotomy decides every single-input system on H^1. Checked
  //    ahead of the singular/ad-rank branch so that the whole H^1 family
  //    carries one provenance.
  if (sys.n == 1 && sys.m() == 1) {
    const H1NormalForm nf = normal_form_h1(sys);
    const double threshold = -0.25 * nf.d * nf.d;
    const bool singular = std::abs(nf.d) <= tol;
    const bool controllable = (nf.b < threshold) || (singular && std::abs(nf.f) > tol);
    v.outcome = controllable ? Outcome::kControllable : Outcome::kNotControllable;
    v.provenance = Provenance::kThm2;
    v.h1 = nf;
    if (std::abs(nf.b - threshold) <= tol) {
      v.notes = "near the boundary b = -d^2/4; strict inequality resolved as false";
    }
    return v;
  }

  // 5. Singular with the ad-rank condition.
  if (is_singular(sys) && ad_rank_condition(sys)) {
    v.outcome = Outcome::kControllable;
    v.provenance = Provenance::kThm6;
    v.notes = "singular system satisfying the ad-rank condition";
    return v;
  }

  // 6. Commuting independent controls: decoupled-cell analysis.
  if (sys.m() <= sys.n && controls_commute(sys)) {
    const DecoupledCells det = detect_decoupled_cells(sys);
    if (det.flag.empty() && !det.cells.empty()) {
      std::optional<DecoupledNormalForm> nf;
      try {
        nf = normal_form_decoupled(sys, det.cells);
      } catch (const std::invalid_argument&) {
        nf.reset();  // per-cell degeneracy; no decoupled conclusion
      }
      if (nf) {
        for (const CellParams& cp : nf->cells) {
          if (cell_controllable(cp, nf->d, tol)) {
            v.outcome = Outcome::kControllable;
            v.provenance = Provenance::kThm8;
            v.decoupled = *nf;
            v.notes = "cell " + std::to_string(cp.index) + " is controllable";
            return v;
          }
        }
        bool any_negative = false;
        for (const CellParams& cp : nf->cells) {
          if (cp.c < 0.0) any_negative = true;
        }
        if (any_negative) {
          v.outcome = Outcome::kControllable;
          v.provenance = Provenance::kThm9Thm10;
          v.decoupled = *nf;
          v.notes = "cell invariants c_j of opposite sign";
          return v;
        }
        if (static_cast<int>(det.cells.size()) == sys.m() && sys.m() == sys.n) {
          v.outcome = Outcome::kNotControllable;
          v.provenance = Provenance::kThm10;
          v.decoupled = *nf;
          v.notes = "completely decoupled, no controllable cell, all c_j positive";
          return v;
        }
        v.decoupled = *nf;  // partial decoupling: keep the data, fall through
      }
    }
  }

  // 7. Regular with Z outside the control span: obstruction search.
  if (!is_singular(sys) && !z_in_control_span(sys)) {
    std::optional<ObstructionCertificate> cert;
    try {
      cert = search_obstruction(sys, opts.budget, opts.seed);
    } catch (const std::invalid_argument&) {
      cert.reset();
    }
    if (cert && verify_certificate(sys, *cert)) {
      v.outcome = Outcome::kNotControllable;
      v.provenance = Provenance::kThm45Certificate;
      v.certificate = std::move(cert);
      v.notes = "verified obstruction certificate (stage: " + v.certificate->stage + ")";
      return v;
    }
  }

  // 8. No criterion applies.
  v.outcome = Outcome::kUnknown;
  if (!is_singular(sys)) {
    v.provenance = Provenance::kConjectureOnly;
    v.notes = "no obstruction found within the search budget; "
              "conjectured controllable (not established)";
  } else {
    v.provenance = Provenance::kNone;
    v.notes = "singular, ad-rank fails, no decoupled conclusion: no criterion applies";
  }
  return v;
}

std::string explain(const Verdict& v) {
  std::ostringstream os;
  os << "outcome: " << to_string(v.outcome) << "\n";
  os << "provenance: " << to_string(v.provenance) << "\n";
  if (v.exact_time) os << "controllable in exact time T for all T > 0\n";
  if (v.h1) {
    os << "H1 normal form: b = " << num(v.h1->b) << ", d = " << num(v.h1->d)
       << ", f = " << num(v.h1->f) << "\n";
    os << "test b < -d^2/4: " << num(v.h1->b) << " < " << num(-0.25 * v.h1->d * v.h1->d)
       << " is " << (v.h1->b < -0.25 * v.h1->d * v.h1->d ? "true" : "false") << "\n";
    os << "test d = 0 and f != 0: "
       << ((std::abs(v.h1->d) <= kDefaultTolerance && std::abs(v.h1->f) > kDefaultTolerance)
               ? "true"
               : "false")
       << "\n";
  }
  if (v.decoupled) {
    os << "decoupled cells (d = " << num(v.decoupled->d) << "):\n";
    for (const CellParams& cp : v.decoupled->cells) {
      os << "  cell " << cp.index << ": b = " << num(cp.b) << ", c = " << num(cp.c)
         << " (" << (cp.c < 0 ? "-" : "+") << ")"
         << ", f = " << num(cp.f) << "\n";
    }
  }
  if (v.certificate) {
    os << "certificate: stage " << v.certificate->stage
       << ", mu = " << num(v.certificate->mu)
       << ", |S| = " << num(v.certificate->S.cwiseAbs().maxCoeff())
       << ", |p| = " << num(v.certificate->p.cwiseAbs().maxCoeff()) << "\n";
  }
  if (!v.notes.empty()) os << "notes: " << v.notes << "\n";
  return os.str();
}

}  // namespace heis
