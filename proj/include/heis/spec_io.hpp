#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "heis/decide.hpp"

namespace heis {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// On-disk description of a system (JSON). The derivation is row-major,
/// either nested rows or a flat list of (2n+1)^2 reals; coordinate order is
/// (x_1, y_1, ..., x_n, y_n, z) throughout.
struct SystemSpec {
  int n = 0;
  Mat derivation;
  std::vector<Vec> controls;
  double tolerance = kDefaultTolerance;
};

inline constexpr int kSchemaVersion = 1;

/// Parses and validates a spec file. Throws SpecError with a message naming
/// the offending field or the violated derivation block condition.
SystemSpec load_spec(const std::string& path);

SystemSpec parse_spec(const nlohmann::json& j);

LinearSystem to_system(const SystemSpec& spec);

nlohmann::json spec_to_json(const SystemSpec& spec);
nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json certificate_to_json(const ObstructionCertificate& cert);

}  // namespace heis
