#include "heis/cli.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "heis/rng.hpp"
#include "heis/sim.hpp"
#include "heis/spec_io.hpp"

namespace heis {

using nlohmann::ordered_json;

namespace {

ordered_json report_header(const RunOptions& opts, const SystemSpec& spec) {
  ordered_json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["command"] = opts.command;
  rep["input"] = spec_to_json(spec);
  return rep;
}

void emit(const ordered_json& rep, const RunOptions& opts, std::ostream& out,
          const std::string& text) {
  if (opts.json_output) {
    out << rep.dump(2) << "\n";
  } else {
    out << text;
  }
}

int cmd_validate(const RunOptions& opts, const SystemSpec& spec, std::ostream& out) {
  const LinearSystem sys = to_system(spec);
  ordered_json rep = report_header(opts, spec);
  rep["valid"] = true;
  rep["m"] = sys.m();
  rep["d"] = sys.D.d;
  rep["singular"] = is_singular(sys);
  rep["rank_condition"] = rank_condition(sys);
  rep["ad_rank_condition"] = ad_rank_condition(sys);
  std::string text = "valid derivation; d = " + std::to_string(sys.D.d) +
                     (is_singular(sys) ? " (singular)\n" : " (regular)\n");
  emit(rep, opts, out, text);
  return 0;
}

int cmd_analyze(const RunOptions& opts, const SystemSpec& spec, std::ostream& out) {
  const LinearSystem sys = to_system(spec);
  DecideOptions dopts;
  dopts.budget = opts.budget;
  dopts.seed = opts.seed;
  const Verdict v = decide(sys, dopts);
  ordered_json rep = report_header(opts, spec);
  rep["seed"] = opts.seed;
  rep["budget"] = opts.budget;
  rep["verdict"] = verdict_to_json(v);
  emit(rep, opts, out, explain(v));
  return 0;
}

int cmd_normal_form(const RunOptions& opts, const SystemSpec& spec, std::ostream& out,
                    std::ostream& err) {
  const LinearSystem sys = to_system(spec);
  ordered_json rep = report_header(opts, spec);
  std::string text;
  if (sys.n == 1 && sys.m() == 1) {
    const H1NormalForm nf = normal_form_h1(sys);
    Verdict v;  // reuse the JSON rendering
    v.h1 = nf;
    rep["normal_form"] = verdict_to_json(v)["h1_normal_form"];
    text = "b = " + std::to_string(nf.b) + ", d = " + std::to_string(nf.d) +
           ", f = " + std::to_string(nf.f) + "\n";
  } else {
    const DecoupledCells det = detect_decoupled_cells(sys);
    if (!det.flag.empty()) {
      err << "normal-form: " << det.flag << "\n";
      return 1;
    }
    if (det.cells.empty()) {
      err << "normal-form: no decoupled cells\n";
      return 1;
    }
    const DecoupledNormalForm nf = normal_form_decoupled(sys, det.cells);
    Verdict v;
    v.decoupled = nf;
    rep["normal_form"] = verdict_to_json(v)["decoupled"];
    text = "d = " + std::to_string(nf.d) + ", " + std::to_string(nf.cells.size()) +
           " decoupled cell(s)\n";
  }
  emit(rep, opts, out, text);
  return 0;
}

int cmd_simulate(const RunOptions& opts, const SystemSpec& spec, std::ostream& out,
                 std::ostream& err) {
  const LinearSystem sys = to_system(spec);
  const std::string csv_path = opts.out_path.empty() ? "trajectory.csv" : opts.out_path;
  std::ofstream csv(csv_path);
  if (!csv) {
    err << "simulate: cannot open output file " << csv_path << "\n";
    return 1;
  }
  ordered_json rep = report_header(opts, spec);
  rep["seed"] = opts.seed;
  rep["horizon"] = opts.horizon;
  rep["samples"] = opts.samples;
  rep["amplitude"] = opts.amplitude;
  rep["step"] = opts.step;
  rep["out"] = csv_path;
  if (opts.samples <= 1) {
    Rng rng = Rng::stream(opts.seed, 0);
    ControlSignal sig;
    const int count = rng.uniform_int(4, 16);
    Vec fractions(count);
    double total = 0.0;
    for (int s = 0; s < count; ++s) {
      fractions(s) = rng.uniform(0.05, 1.0);
      total += fractions(s);
    }
    for (int s = 0; s < count; ++s) {
      ControlSignal::Segment seg;
      seg.duration = opts.horizon * fractions(s) / total;
      seg.u = Vec(sys.m());
      for (int j = 0; j < sys.m(); ++j) seg.u(j) = rng.uniform(-opts.amplitude, opts.amplitude);
      sig.segments.push_back(std::move(seg));
    }
    const Trajectory traj = integrate(sys, GroupElement::identity(sys.n), sig, opts.step);
    write_csv(traj, csv);
    rep["rows"] = traj.times.size();
  } else {
    const auto cloud = sample_reachable(sys, opts.horizon, opts.samples, opts.amplitude,
                                        opts.seed, TimeDirection::kForward, opts.step);
    Trajectory endpoints;
    for (const auto& g : cloud) {
      endpoints.times.push_back(opts.horizon);
      endpoints.states.push_back(g);
    }
    write_csv(endpoints, csv);
    rep["rows"] = endpoints.times.size();
  }
  emit(rep, opts, out, "trajectory written to " + csv_path + "\n");
  return 0;
}

int cmd_certify(const RunOptions& opts, const SystemSpec& spec, std::ostream& out,
                std::ostream& err) {
  const LinearSystem sys = to_system(spec);
  ordered_json rep = report_header(opts, spec);
  rep["seed"] = opts.seed;
  rep["budget"] = opts.budget;
  std::optional<ObstructionCertificate> cert;
  try {
    cert = search_obstruction(sys, opts.budget, opts.seed);
  } catch (const std::invalid_argument& e) {
    err << "certify: " << e.what() << "\n";
    return 1;
  }
  std::string text;
  if (cert) {
    if (!verify_certificate(sys, *cert)) {
      err << "certify: certificate failed re-verification\n";
      return 2;
    }
    rep["certificate"] = certificate_to_json(*cert);
    rep["verified"] = true;
    text = "certificate found (stage " + cert->stage + "), mu = " +
           std::to_string(cert->mu) + "\n";
  } else {
    rep["certificate"] = nullptr;
    text = "no certificate found (not a controllability proof)\n";
  }
  emit(rep, opts, out, text);
  return 0;
}

}  // namespace

int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  SystemSpec spec;
  try {
    spec = load_spec(opts.spec_path);
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    if (opts.command == "validate") return cmd_validate(opts, spec, out);
    if (opts.command == "analyze") return cmd_analyze(opts, spec, out);
    if (opts.command == "normal-form") return cmd_normal_form(opts, spec, out, err);
    if (opts.command == "simulate") return cmd_simulate(opts, spec, out, err);
    if (opts.command == "certify") return cmd_certify(opts, spec, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return 2;
  }
  err << "error: unknown command '" << opts.command << "'\n";
  return 1;
}

}  // namespace heis
