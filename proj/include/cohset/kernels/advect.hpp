#pragma once

// Ensemble advection kernels for the driven wave field.
//
// The driver does not depend on the particles, so everything that depends
// only on the driver (phase rotation, amplitude, forcing) is precomputed per
// RK4 stage. The kernels then only evaluate sin/cos of the particle
// coordinates. A scalar reference kernel and an AVX2/FMA kernel implement
// the same step; the AVX2 one is chosen at runtime when the CPU supports it.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cohset {

/// Driver-dependent coefficients of one RK4 stage:
///   s = sin(x - phase), c = cos(x - phase)
///   xdot = drift - amplitude * s * cos(y) + forcing * G(s sin(y) + y/2 - pi/4)
///   ydot = amplitude * c * sin(y)
/// with G(g) = 1 / (g^2 + 1)^2.
struct StageForcing {
  double cos_phase = 1.0;
  double sin_phase = 0.0;
  double amplitude = 1.0;
  double forcing = 0.0;
};

struct WaveStep {
  double h = 0.0;
  std::array<StageForcing, 4> stages{};
};

struct AdvectPlan {
  double drift = 0.5;
  double x_period = 0.0;  // x reduced into [0, x_period) after each step
  double y_lower = 0.0;   // y clamped into [y_lower, y_upper]
  double y_upper = 0.0;
  std::vector<WaveStep> steps;
  /// Snapshot r is taken after record_after[r] steps (0 = initial state).
  std::vector<std::size_t> record_after;
};

/// Worker slice of an ensemble. snap_x[r]/snap_y[r] alias the same range.
struct AdvectBatch {
  std::span<double> x;
  std::span<double> y;
  std::vector<std::span<double>> snap_x;
  std::vector<std::span<double>> snap_y;
};

enum class KernelKind { scalar, avx2 };
enum class KernelPreference { automatic, scalar, avx2 };

std::string_view to_string(KernelKind kind);
KernelPreference kernel_preference_from_string(std::string_view name);

/// True when the AVX2 kernel was compiled in and the CPU supports AVX2+FMA.
bool avx2_available();

/// Resolve a preference to a kernel. The COHSET_KERNEL environment variable
/// (scalar|avx2|auto) overrides `automatic`. Asking for avx2 on a machine
/// without it throws ConfigError.
KernelKind select_kernel(KernelPreference pref);

void advect_scalar(const AdvectPlan& plan, AdvectBatch& batch);
void advect_avx2(const AdvectPlan& plan, AdvectBatch& batch);
void advect(KernelKind kind, const AdvectPlan& plan, AdvectBatch& batch);

/// One RK4 step of a single particle, reference arithmetic.
void wave_step_scalar(const WaveStep& step, double drift, double& x, double& y);

namespace simd {
/// Vectorised sin/cos used by the AVX2 kernel, exposed for accuracy tests.
/// Requires avx2_available().
void sincos_avx2(std::span<const double> in, std::span<double> s, std::span<double> c);
}  // namespace simd

}  // namespace cohset
