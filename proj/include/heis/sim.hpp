#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "heis/obstruct.hpp"

namespace heis {

/// Piecewise-constant input signal.
struct ControlSignal {
  struct Segment {
    double duration = 0.0;
    Vec u;
  };
  std::vector<Segment> segments;

  double total_duration() const;
};

/// Right-hand side of gdot = X(g) + sum u_j B_j(g), as a flat tangent vector.
/// A control B = (alpha, beta, gamma) contributes u (alpha, beta, gamma + <beta, x_g>).
Vec controlled_field(const LinearSystem& sys, const GroupElement& g, const Vec& u);

struct Trajectory {
  std::vector<double> times;
  std::vector<GroupElement> states;
};

/// Fixed-step RK4 over each constant-control segment. `backward` integrates
/// the time-reversed system (the whole field negated).
Trajectory integrate(const LinearSystem& sys, const GroupElement& g0,
                     const ControlSignal& signal, double step, bool backward = false);

enum class TimeDirection { kForward, kBackward };

/// Endpoints of `samples` random piecewise-constant signals from the identity
/// (4-16 segments, values uniform within the amplitude; the per-sample
/// amplitude is stratified over decreasing scales so the cloud probes both
/// large excursions and the neighbourhood of the identity). Deterministic for
/// a fixed seed; per-sample streams are independent.
std::vector<GroupElement> sample_reachable(const LinearSystem& sys, double horizon,
                                           int samples, double amplitude,
                                           std::uint64_t seed, TimeDirection direction,
                                           double step = 1e-2);

/// Deterministic direction net: +-e_i and the diagonals (+-e_i +- e_j)/sqrt(2).
std::vector<Vec> direction_net(int dim);

/// A cloud covers the ball of radius r around the identity when every net
/// point scaled to radius r has a cloud point within r/4.
bool ball_coverage(const std::vector<GroupElement>& cloud, double radius);

/// Samples random states on the surface w = -mu/d and random controls, and
/// checks that w is non-decreasing through the surface and that the
/// certificate's (l', Q') reconstruction matches the true field derivative.
bool check_hyperplane(const LinearSystem& sys, const ObstructionCertificate& cert,
                      int samples, std::uint64_t seed);

/// CSV export: header t,x1,y1,...,xn,yn,z; one row per sample time, full
/// double precision.
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace heis
