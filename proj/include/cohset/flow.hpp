#pragma once

#include <array>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "cohset/kernels/advect.hpp"

namespace cohset {

using Vec3 = std::array<double, 3>;

/// Lorenz driver with time rescaled by `tau`.
struct LorenzParams {
  double sigma = 10.0;
  double beta = 8.0 / 3.0;
  double rho = 28.0;
  double tau = 6.6685;
};

/// Travelling wave on the cylinder S^1 x [0,pi], optionally perturbed.
///
/// The phase variable is ztilde = phase_scale * z1, the wave phase nu ztilde
/// and the amplitude A0 + amp_mod sin(amp_freq ztilde). With `perturbed` the
/// x component gains eps G(g) sin(ztilde/2).
struct WaveParams {
  double c = 0.5;
  double A0 = 1.0;
  double nu = 0.25;
  double eps = 1.0;
  double amp_mod = 0.125;
  double amp_freq = 2.2360679774997896964;  // sqrt(5)
  double phase_scale = 6.6685;
  bool perturbed = true;
};

struct FlowSystem {
  LorenzParams lorenz;
  WaveParams wave;
  Vec3 z_init{0.0, 1.0, 1.5};
  /// Time at which the driver sits at z_init.
  double anchor = 0.0;
  double h = 0.01;

  /// Unperturbed, unmodulated wave driven by nu * z1 directly.
  static FlowSystem lorenz_wave();
  /// Perturbed wave with eps = 1, driven by 6.6685 * z1.
  static FlowSystem perturbed_wave();
};

Vec3 lorenz_rhs(const LorenzParams& p, const Vec3& z);

/// (xdot, ydot) of the wave field at phase variable `ztilde`.
std::array<double, 2> wave_rhs(const WaveParams& p, double ztilde, double x, double y, bool perturbed);
inline std::array<double, 2> wave_rhs(const WaveParams& p, double ztilde, double x, double y) {
  return wave_rhs(p, ztilde, x, y, p.perturbed);
}

/// Combined driver + driven state.
struct FlowState {
  Vec3 z;
  double x;
  double y;
};

/// One classical RK4 step of the driver alone.
Vec3 lorenz_step(const LorenzParams& p, const Vec3& z, double h);

/// Stage coefficients of one combined RK4 step from driver state `z`;
/// `z_next` receives the driver after the step.
WaveStep driven_step(const FlowSystem& sys, const Vec3& z, double h, Vec3& z_next);

/// Driver-only flow; negative durations integrate backward with h/10.
/// Throws IntegrationError when the state turns nonfinite or runs away.
Vec3 flow_driver(const FlowSystem& sys, const Vec3& z, double duration);

/// Fixed-step RK4 of the 5D system (driver + wave) for `duration` >= 0.
/// The last step is shortened to land on the endpoint; y is clamped to the
/// walls and x reduced mod 2pi after every step. `t0` only labels the start.
FlowState flow(const FlowSystem& sys, double t0, double duration, const FlowState& state);

/// Driver trajectory anchored at `sys.anchor`, with cached grid states.
///
/// Queries at anchor + m h are served from the same RK4 recursion the
/// ensemble integrator uses, so flows launched from grid times agree
/// bit-for-bit with one long flow.
class DrivingPath {
 public:
  explicit DrivingPath(FlowSystem sys);

  const FlowSystem& system() const { return sys_; }
  Vec3 state_at(double t) const;

 private:
  Vec3 grid_state(long m) const;

  FlowSystem sys_;
  mutable std::mutex mutex_;
  mutable std::vector<Vec3> forward_;   // index m -> anchor + m h
  mutable std::vector<Vec3> backward_;  // index m -> anchor - m h
};

/// Per-step forcing schedule for the ensemble kernels covering
/// [t0, t0 + duration], starting the driver at `z_start`.
/// Every record offset must fall on a step boundary or equal `duration`.
AdvectPlan make_plan(const FlowSystem& sys, const Vec3& z_start, double duration,
                     std::span<const double> record_offsets);

/// Advect an ensemble of (x, y) points; snapshots[r] receives the positions
/// at record_offsets[r]. Work is split over `workers` threads; results do not
/// depend on the worker count.
struct Ensemble {
  std::vector<double> x;
  std::vector<double> y;
};
std::vector<Ensemble> advect_ensemble(const FlowSystem& sys, const Vec3& z_start, const Ensemble& start,
                                      std::span<const double> record_offsets, KernelKind kernel,
                                      unsigned workers);

}  // namespace cohset
