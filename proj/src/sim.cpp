#include "heis/sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "heis/rng.hpp"

namespace heis {

namespace {

Vec field_flat(const LinearSystem& sys, const Vec& state, const Vec& u, bool backward) {
  const GroupElement g = GroupElement::from_flat(state);
  Vec dot = linear_field_eval(sys.D, g);
  for (int j = 0; j < sys.m(); ++j) {
    const AlgebraElement& B = sys.controls[j];
    Vec contrib = B.flat();
    contrib(2 * sys.n) += B.y.dot(g.x);
    dot += u(j) * contrib;
  }
  return backward ? Vec(-dot) : dot;
}

Vec rk4_step(const LinearSystem& sys, const Vec& state, const Vec& u, double h,
             bool backward) {
  const Vec k1 = field_flat(sys, state, u, backward);
  const Vec k2 = field_flat(sys, state + 0.5 * h * k1, u, backward);
  const Vec k3 = field_flat(sys, state + 0.5 * h * k2, u, backward);
  const Vec k4 = field_flat(sys, state + h * k3, u, backward);
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ControlSignal random_signal(const LinearSystem& sys, double horizon, double amplitude,
                            Rng& rng) {
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
    seg.duration = horizon * fractions(s) / total;
    seg.u = Vec(sys.m());
    for (int j = 0; j < sys.m(); ++j) seg.u(j) = rng.uniform(-amplitude, amplitude);
    sig.segments.push_back(std::move(seg));
  }
  return sig;
}

}  // namespace

double ControlSignal::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

Vec controlled_field(const LinearSystem& sys, const GroupElement& g, const Vec& u) {
  if (u.size() != sys.m()) {
    throw std::invalid_argument("controlled_field: control dimension mismatch");
  }
  if (g.n != sys.n) {
    throw std::invalid_argument("controlled_field: state dimension mismatch");
  }
  return field_flat(sys, g.flat(), u, false);
}

Trajectory integrate(const LinearSystem& sys, const GroupElement& g0,
                     const ControlSignal& signal, double step, bool backward) {
  if (step <= 0.0) throw std::invalid_argument("integrate: step must be positive");
  for (const auto& seg : signal.segments) {
    if (seg.duration <= 0.0) {
      throw std::invalid_argument("integrate: segment durations must be positive");
    }
    if (seg.u.size() != sys.m()) {
      throw std::invalid_argument("integrate: control dimension mismatch");
    }
  }
  Trajectory traj;
  Vec state = g0.flat();
  double t = 0.0;
  traj.times.push_back(t);
  traj.states.push_back(g0);
  for (const auto& seg : signal.segments) {
    double remaining = seg.duration;
    while (remaining > 1e-15) {
      const double h = std::min(step, remaining);
      state = rk4_step(sys, state, seg.u, h, backward);
      remaining -= h;
      t += h;
      traj.times.push_back(t);
      traj.states.push_back(GroupElement::from_flat(state));
    }
  }
  return traj;
}

std::vector<GroupElement> sample_reachable(const LinearSystem& sys, double horizon,
                                           int samples, double amplitude,
                                           std::uint64_t seed, TimeDirection direction,
                                           double step) {
  if (samples <= 0) throw std::invalid_argument("sample_reachable: samples > 0 required");
  // Amplitude strata: large controls sweep far, small ones probe near e.
  static constexpr double kScales[] = {1.0, 0.25, 0.0625, 0.015625, 0.00390625,
                                       0.0009765625};
  static constexpr int kNumScales = 6;
  std::vector<GroupElement> cloud;
  cloud.reserve(samples);
  const bool backward = direction == TimeDirection::kBackward;
  for (int k = 0; k < samples; ++k) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
    const double amp = amplitude * kScales[k % kNumScales];
    const ControlSignal sig = random_signal(sys, horizon, amp, rng);
    const Trajectory traj =
        integrate(sys, GroupElement::identity(sys.n), sig, step, backward);
    cloud.push_back(traj.states.back());
  }
  return cloud;
}

std::vector<Vec> direction_net(int dim) {
  std::vector<Vec> net;
  for (int i = 0; i < dim; ++i) {
    net.push_back(Vec::Unit(dim, i));
    net.push_back(-Vec::Unit(dim, i));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      for (int si = -1; si <= 1; si += 2) {
        for (int sj = -1; sj <= 1; sj += 2) {
          Vec v = Vec::Zero(dim);
          v(i) = si * inv_sqrt2;
          v(j) = sj * inv_sqrt2;
          net.push_back(v);
        }
      }
    }
  }
  return net;
}

bool ball_coverage(const std::vector<GroupElement>& cloud, double radius) {
  if (cloud.empty()) return false;
  const int dim = 2 * cloud.front().n + 1;
  for (const Vec& dir : direction_net(dim)) {
    const Vec target = radius * dir;
    bool hit = false;
    for (const GroupElement& g : cloud) {
      if ((g.flat() - target).norm() <= radius / 4.0) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool check_hyperplane(const LinearSystem& sys, const ObstructionCertificate& cert,
                      int samples, std::uint64_t seed) {
  if (!verify_certificate(sys, cert)) return false;
  const int q = 2 * sys.n;
  const auto frame_qr = cert.frame.columns.colPivHouseholderQr();
  const Mat Dmat = frame_qr.solve(sys.D.matrix * cert.frame.columns);
  const double d = Dmat(q, q);
  const double w_level = -cert.mu / d;

  for (int k = 0; k < samples; ++k) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
    Vec v(q);
    for (int i = 0; i < q; ++i) v(i) = rng.uniform(-5.0, 5.0);
    const double Pv = 0.5 * v.dot(cert.S * v) + cert.p.dot(v);
    const double z_frame = w_level - Pv;
    Vec frame_coords(q + 1);
    frame_coords.head(q) = v;
    frame_coords(q) = z_frame;
    const GroupElement g = GroupElement::from_flat(cert.frame.columns * frame_coords);
    Vec u(sys.m());
    for (int j = 0; j < sys.m(); ++j) u(j) = rng.uniform(-10.0, 10.0);

    const Vec tangent = frame_qr.solve(controlled_field(sys, g, u));
    const Vec vdot = tangent.head(q);
    const double zdot = tangent(q);
    const double wdot = zdot + (cert.S * v + cert.p).dot(vdot);

    const double scale = 1.0 + std::abs(cert.mu) +
                         std::abs(v.dot(cert.Qprime * v)) +
                         std::abs(cert.lprime.dot(v)) + vdot.norm();
    // The surface can be crossed only with w increasing.
    if (wdot < -1e-7 * scale) return false;
    // The certificate's reconstruction must match the true derivative.
    const double reconstructed = d * w_level + cert.lprime.dot(v) + v.dot(cert.Qprime * v);
    if (std::abs(wdot - reconstructed) > 1e-6 * scale) return false;
  }
  return true;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  if (traj.states.empty()) return;
  const int n = traj.states.front().n;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i << ",y" << i;
  out << ",z\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (size_t k = 0; k < traj.states.size(); ++k) {
    put(traj.times[k]);
    const GroupElement& g = traj.states[k];
    for (int i = 0; i < n; ++i) {
      out << ",";
      put(g.x(i));
      out << ",";
      put(g.y(i));
    }
    out << ",";
    put(g.z);
    out << "\n";
  }
}

}  // namespace heis
