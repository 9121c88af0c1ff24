#include <algorithm>
#include <cmath>

#include "cohset/kernels/advect.hpp"

namespace cohset {

namespace {

inline void field(const StageForcing& f, double drift, double x, double y, double& dx, double& dy) {
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double sy = std::sin(y);
  const double cy = std::cos(y);
  // sin/cos of (x - phase) by rotation
  const double s = sx * f.cos_phase - cx * f.sin_phase;
  const double c = cx * f.cos_phase + sx * f.sin_phase;
  const double g = s * sy + 0.5 * y - 0.78539816339744830962;
  const double q = g * g + 1.0;
  dx = drift - f.amplitude * s * cy + f.forcing / (q * q);
  dy = f.amplitude * c * sy;
}

}  // namespace

void wave_step_scalar(const WaveStep& step, double drift, double& x, double& y) {
  const double h = step.h;
  double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
  field(step.stages[0], drift, x, y, k1x, k1y);
  field(step.stages[1], drift, x + 0.5 * h * k1x, y + 0.5 * h * k1y, k2x, k2y);
  field(step.stages[2], drift, x + 0.5 * h * k2x, y + 0.5 * h * k2y, k3x, k3y);
  field(step.stages[3], drift, x + h * k3x, y + h * k3y, k4x, k4y);
  x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
}

void advect_scalar(const AdvectPlan& plan, AdvectBatch& batch) {
  const std::size_t n = batch.x.size();
  const std::size_t nrec = plan.record_after.size();
  for (std::size_t i = 0; i < n; ++i) {
    double x = batch.x[i];
    double y = batch.y[i];
    std::size_t r = 0;
    while (r < nrec && plan.record_after[r] == 0) {
      batch.snap_x[r][i] = x;
      batch.snap_y[r][i] = y;
      ++r;
    }
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
      wave_step_scalar(plan.steps[s], plan.drift, x, y);
      if (plan.x_period > 0) {
        x -= plan.x_period * std::floor(x / plan.x_period);
        if (x >= plan.x_period) x = 0.0;
      }
      if (plan.y_upper > plan.y_lower) y = std::clamp(y, plan.y_lower, plan.y_upper);
      while (r < nrec && plan.record_after[r] == s + 1) {
        batch.snap_x[r][i] = x;
        batch.snap_y[r][i] = y;
        ++r;
      }
    }
    batch.x[i] = x;
    batch.y[i] = y;
  }
}

}  // namespace cohset
