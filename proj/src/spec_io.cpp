#include "heis/spec_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace heis {

using nlohmann::json;

namespace {

Mat parse_matrix(const json& j, int dim, const char* field) {
  Mat M(dim, dim);
  if (!j.is_array() || j.empty()) {
    throw SpecError(std::string(field) + ": expected an array");
  }
  if (j.front().is_array()) {
    if (static_cast<int>(j.size()) != dim) {
      throw SpecError(std::string(field) + ": expected " + std::to_string(dim) + " rows");
    }
    for (int r = 0; r < dim; ++r) {
      const auto& row = j.at(r);
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw SpecError(std::string(field) + ": row " + std::to_string(r + 1) +
                        " must have " + std::to_string(dim) + " entries");
      }
      for (int c = 0; c < dim; ++c) M(r, c) = row.at(c).get<double>();
    }
  } else {
    if (static_cast<int>(j.size()) != dim * dim) {
      throw SpecError(std::string(field) + ": flat row-major array must have " +
                      std::to_string(dim * dim) + " entries");
    }
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) M(r, c) = j.at(r * dim + c).get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

SystemSpec parse_spec(const json& j) {
  SystemSpec spec;
  if (!j.contains("n") || !j.at("n").is_number_integer() || j.at("n").get<int>() < 1) {
    throw SpecError("field 'n' must be a positive integer");
  }
  spec.n = j.at("n").get<int>();
  const int dim = 2 * spec.n + 1;
  if (!j.contains("derivation")) throw SpecError("missing field 'derivation'");
  spec.derivation = parse_matrix(j.at("derivation"), dim, "derivation");
  if (!j.contains("controls") || !j.at("controls").is_array() || j.at("controls").empty()) {
    throw SpecError("field 'controls' must be a non-empty array");
  }
  int idx = 0;
  for (const auto& c : j.at("controls")) {
    ++idx;
    if (!c.is_array() || static_cast<int>(c.size()) != dim) {
      throw SpecError("control " + std::to_string(idx) + " has length " +
                      std::to_string(c.size()) + ", expected " + std::to_string(dim));
    }
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = c.at(i).get<double>();
    spec.controls.push_back(std::move(v));
  }
  if (j.contains("tolerance")) {
    spec.tolerance = j.at("tolerance").get<double>();
    if (!(spec.tolerance > 0.0)) throw SpecError("field 'tolerance' must be positive");
  }
  // Structure check up front so load failures name the violated condition.
  try {
    Derivation::from_matrix(spec.derivation, spec.n, spec.tolerance);
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  return spec;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SpecError(std::string("JSON parse error: ") + e.what());
  }
  return parse_spec(j);
}

LinearSystem to_system(const SystemSpec& spec) {
  std::vector<AlgebraElement> controls;
  controls.reserve(spec.controls.size());
  for (const Vec& c : spec.controls) controls.push_back(AlgebraElement::from_flat(c));
  return make_system(Derivation::from_matrix(spec.derivation, spec.n, spec.tolerance),
                     std::move(controls), spec.tolerance);
}

json spec_to_json(const SystemSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["derivation"] = matrix_to_json(spec.derivation);
  json controls = json::array();
  for (const Vec& c : spec.controls) controls.push_back(vector_to_json(c));
  j["controls"] = std::move(controls);
  j["tolerance"] = spec.tolerance;
  return j;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["outcome"] = to_string(v.outcome);
  j["provenance"] = to_string(v.provenance);
  j["exact_time"] = v.exact_time;
  j["notes"] = v.notes;
  if (v.h1) {
    j["h1_normal_form"] = {{"b", v.h1->b},
                           {"d", v.h1->d},
                           {"f", v.h1->f},
                           {"frame", matrix_to_json(v.h1->frame.columns)}};
  }
  if (v.decoupled) {
    json cells = json::array();
    for (const CellParams& cp : v.decoupled->cells) {
      cells.push_back({{"index", cp.index}, {"b", cp.b}, {"c", cp.c}, {"f", cp.f}});
    }
    j["decoupled"] = {{"d", v.decoupled->d},
                      {"cells", std::move(cells)},
                      {"frame", matrix_to_json(v.decoupled->frame.columns)}};
  }
  if (v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
  return j;
}

json certificate_to_json(const ObstructionCertificate& cert) {
  json j;
  j["S"] = matrix_to_json(cert.S);
  j["p"] = vector_to_json(cert.p);
  j["lprime"] = vector_to_json(cert.lprime);
  j["Qprime"] = matrix_to_json(cert.Qprime);
  j["mu"] = cert.mu;
  j["frame"] = matrix_to_json(cert.frame.columns);
  j["zscale"] = cert.frame.zscale;
  j["admissibility_residuals"] = vector_to_json(cert.admissibility_residuals);
  j["stage"] = cert.stage;
  return j;
}

}  // namespace heis
