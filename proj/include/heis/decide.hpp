#pragma once

#include <optional>
#include <string>

#include "heis/obstruct.hpp"

namespace heis {

enum class Outcome { kControllable, kNotControllable, kUnknown };

enum class Provenance {
  kRankFail,
  kThm2,
  kThm3,  // restatement of the H^1 dichotomy; the engine reports Thm2
  kThm45Certificate,
  kThm6,
  kThm7,
  kCor1,
  kThm8,
  kThm9Thm10,
  kThm10,
  kConjectureOnly,
  kNone,  // singular case with no applicable criterion
};

std::string to_string(Outcome o);
std::string to_string(Provenance p);

struct Verdict {
  Outcome outcome = Outcome::kUnknown;
  Provenance provenance = Provenance::kNone;
  bool exact_time = false;  // "in exact time T for all T > 0"
  std::optional<ObstructionCertificate> certificate;
  std::string notes;
  std::optional<H1NormalForm> h1;
  std::optional<DecoupledNormalForm> decoupled;
};

/// H^1-type cell criterion: controllable iff the quotient eigenvalues are not
/// real (d^2 + 4 b c < 0), or d = 0 and f != 0. Requires c != 0.
bool cell_controllable(const CellParams& p, double d, double tol = kDefaultTolerance);

struct DecideOptions {
  int budget = 64;          // obstruction-search starts
  std::uint64_t seed = 0;
};

/// Applies the decision branches in a fixed order; the first applicable one
/// decides and stamps its provenance.
Verdict decide(const LinearSystem& sys, const DecideOptions& opts = {});

/// Deterministic human-readable rendering of a verdict.
std::string explain(const Verdict& v);

}  // namespace heis
