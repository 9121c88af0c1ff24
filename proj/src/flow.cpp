#include "cohset/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "cohset/errors.hpp"

namespace cohset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRunaway = 1e3;

Vec3 axpy(const Vec3& z, double a, const Vec3& k) { return {z[0] + a * k[0], z[1] + a * k[1], z[2] + a * k[2]}; }

StageForcing forcing_at(const WaveParams& w, const Vec3& z) {
  const double zt = w.phase_scale * z[0];
  const double phase = w.nu * zt;
  StageForcing f;
  f.cos_phase = std::cos(phase);
  f.sin_phase = std::sin(phase);
  f.amplitude = w.A0 + w.amp_mod * std::sin(w.amp_freq * zt);
  f.forcing = w.perturbed ? w.eps * std::sin(0.5 * zt) : 0.0;
  return f;
}

void check_driver(const Vec3& z, const char* where) {
  for (double v : z) {
    if (!std::isfinite(v) || std::abs(v) > kRunaway) {
      throw IntegrationError(std::string(where) + ": driving state left the attractor region");
    }
  }
}

double wrap_x(double x) {
  x -= kTwoPi * std::floor(x / kTwoPi);
  return x >= kTwoPi ? 0.0 : x;
}

// Step count for `duration`, tolerating rounding in duration / h.
std::size_t step_count(double duration, double h) {
  const double r = duration / h;
  const double n = std::round(r);
  if (std::abs(r - n) < 1e-9 * std::max(1.0, n)) return static_cast<std::size_t>(n);
  return static_cast<std::size_t>(std::ceil(r));
}

}  // namespace

FlowSystem FlowSystem::lorenz_wave() {
  FlowSystem s;
  s.wave.phase_scale = 1.0;
  s.wave.amp_mod = 0.0;
  s.wave.eps = 0.0;
  s.wave.perturbed = false;
  return s;
}

FlowSystem FlowSystem::perturbed_wave() { return FlowSystem{}; }

Vec3 lorenz_rhs(const LorenzParams& p, const Vec3& z) {
  return {p.sigma * (z[1] - z[0]) / p.tau, (z[0] * (p.rho - z[2]) - z[1]) / p.tau,
          (z[0] * z[1] - p.beta * z[2]) / p.tau};
}

std::array<double, 2> wave_rhs(const WaveParams& p, double ztilde, double x, double y, bool perturbed) {
  const double phase = p.nu * ztilde;
  const double A = p.A0 + p.amp_mod * std::sin(p.amp_freq * ztilde);
  const double s = std::sin(x - phase);
  const double c = std::cos(x - phase);
  double xdot = p.c - A * s * std::cos(y);
  const double ydot = A * c * std::sin(y);
  if (perturbed) {
    const double g = s * std::sin(y) + 0.5 * y - 0.25 * std::numbers::pi;
    const double q = g * g + 1.0;
    xdot += p.eps * std::sin(0.5 * ztilde) / (q * q);
  }
  return {xdot, ydot};
}

Vec3 lorenz_step(const LorenzParams& p, const Vec3& z, double h) {
  const Vec3 k1 = lorenz_rhs(p, z);
  const Vec3 k2 = lorenz_rhs(p, axpy(z, 0.5 * h, k1));
  const Vec3 k3 = lorenz_rhs(p, axpy(z, 0.5 * h, k2));
  const Vec3 k4 = lorenz_rhs(p, axpy(z, h, k3));
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

WaveStep driven_step(const FlowSystem& sys, const Vec3& z, double h, Vec3& z_next) {
  const auto& p = sys.lorenz;
  const Vec3 k1 = lorenz_rhs(p, z);
  const Vec3 z2 = axpy(z, 0.5 * h, k1);
  const Vec3 k2 = lorenz_rhs(p, z2);
  const Vec3 z3 = axpy(z, 0.5 * h, k2);
  const Vec3 k3 = lorenz_rhs(p, z3);
  const Vec3 z4 = axpy(z, h, k3);
  const Vec3 k4 = lorenz_rhs(p, z4);
  for (int i = 0; i < 3; ++i) z_next[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  WaveStep step;
  step.h = h;
  step.stages = {forcing_at(sys.wave, z), forcing_at(sys.wave, z2), forcing_at(sys.wave, z3),
                 forcing_at(sys.wave, z4)};
  return step;
}

Vec3 flow_driver(const FlowSystem& sys, const Vec3& z, double duration) {
  if (duration == 0.0) return z;
  const double h = duration > 0 ? sys.h : -sys.h / 10.0;
  const std::size_t n = step_count(std::abs(duration), std::abs(h));
  Vec3 cur = z;
  double done = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hh = (i + 1 == n) ? duration - done : h;
    cur = lorenz_step(sys.lorenz, cur, hh);
    done += h;
    check_driver(cur, "flow_driver");
  }
  return cur;
}

FlowState flow(const FlowSystem& sys, double /*t0*/, double duration, const FlowState& state) {
  if (duration < 0) throw DomainError("flow: the driven state only flows forward");
  if (!(sys.h > 0)) throw ConfigError("flow: step h must be positive");
  FlowState cur = state;
  const std::size_t n = step_count(duration, sys.h);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = (i + 1 == n) ? duration - static_cast<double>(i) * sys.h : sys.h;
    Vec3 z_next;
    const WaveStep step = driven_step(sys, cur.z, h, z_next);
    wave_step_scalar(step, sys.wave.c, cur.x, cur.y);
    cur.z = z_next;
    cur.y = std::clamp(cur.y, 0.0, std::numbers::pi);
    cur.x = wrap_x(cur.x);
    if (!std::isfinite(cur.x) || !std::isfinite(cur.y)) throw IntegrationError("flow: nonfinite state");
    check_driver(cur.z, "flow");
  }
  return cur;
}

DrivingPath::DrivingPath(FlowSystem sys) : sys_(std::move(sys)) {
  if (!(sys_.h > 0)) throw ConfigError("DrivingPath: step h must be positive");
  forward_.push_back(sys_.z_init);
  backward_.push_back(sys_.z_init);
}

Vec3 DrivingPath::grid_state(long m) const {
  std::lock_guard lock(mutex_);
  if (m >= 0) {
    const auto idx = static_cast<std::size_t>(m);
    while (forward_.size() <= idx) {
      Vec3 next;
      driven_step(sys_, forward_.back(), sys_.h, next);
      check_driver(next, "DrivingPath");
      forward_.push_back(next);
    }
    return forward_[idx];
  }
  const auto idx = static_cast<std::size_t>(-m);
  while (backward_.size() <= idx) {
    Vec3 z = backward_.back();
    for (int i = 0; i < 10; ++i) {
      z = lorenz_step(sys_.lorenz, z, -sys_.h / 10.0);
      check_driver(z, "DrivingPath (backward)");
    }
    backward_.push_back(z);
  }
  return backward_[idx];
}

Vec3 DrivingPath::state_at(double t) const {
  const double r = (t - sys_.anchor) / sys_.h;
  const double m = std::round(r);
  if (std::abs(r - m) < 1e-9 * std::max(1.0, std::abs(m))) return grid_state(static_cast<long>(m));
  const double base = std::floor(r);
  const Vec3 z = grid_state(static_cast<long>(base));
  return lorenz_step(sys_.lorenz, z, t - (sys_.anchor + base * sys_.h));
}

AdvectPlan make_plan(const FlowSystem& sys, const Vec3& z_start, double duration,
                     std::span<const double> record_offsets) {
  if (!(duration >= 0)) throw DomainError("make_plan: negative duration");
  AdvectPlan plan;
  plan.drift = sys.wave.c;
  plan.x_period = kTwoPi;
  plan.y_lower = 0.0;
  plan.y_upper = std::numbers::pi;
  const std::size_t n = step_count(duration, sys.h);
  plan.steps.reserve(n);
  Vec3 z = z_start;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = (i + 1 == n) ? duration - static_cast<double>(i) * sys.h : sys.h;
    Vec3 next;
    plan.steps.push_back(driven_step(sys, z, h, next));
    check_driver(next, "make_plan");
    z = next;
  }
  for (double off : record_offsets) {
    if (off < 0 || off > duration * (1 + 1e-12)) throw DomainError("make_plan: record offset outside the flow");
    const double r = off / sys.h;
    const double m = std::round(r);
    std::size_t after;
    if (std::abs(off - duration) <= 1e-12 * std::max(1.0, duration)) {
      after = n;
    } else if (std::abs(r - m) < 1e-9 * std::max(1.0, m)) {
      after = static_cast<std::size_t>(m);
    } else {
      throw ConfigError("make_plan: record offset is not a multiple of the step");
    }
    if (!plan.record_after.empty() && after < plan.record_after.back()) {
      throw ConfigError("make_plan: record offsets must be ascending");
    }
    plan.record_after.push_back(after);
  }
  return plan;
}

std::vector<Ensemble> advect_ensemble(const FlowSystem& sys, const Vec3& z_start, const Ensemble& start,
                                      std::span<const double> record_offsets, KernelKind kernel,
                                      unsigned workers) {
  if (start.x.size() != start.y.size()) throw DomainError("advect_ensemble: x/y length mismatch");
  const double duration = record_offsets.empty() ? 0.0 : record_offsets.back();
  const AdvectPlan plan = make_plan(sys, z_start, duration, record_offsets);

  const std::size_t n = start.x.size();
  std::vector<Ensemble> snaps(record_offsets.size());
  for (auto& s : snaps) {
    s.x.resize(n);
    s.y.resize(n);
  }
  Ensemble work = start;

  workers = std::max(1u, workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  auto run = [&](std::size_t lo, std::size_t hi) {
    AdvectBatch b;
    b.x = std::span(work.x).subspan(lo, hi - lo);
    b.y = std::span(work.y).subspan(lo, hi - lo);
    for (auto& s : snaps) {
      b.snap_x.push_back(std::span(s.x).subspan(lo, hi - lo));
      b.snap_y.push_back(std::span(s.y).subspan(lo, hi - lo));
    }
    advect(kernel, plan, b);
  };

  if (workers == 1 || n < 2) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(n, w * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) continue;
      pool.emplace_back([&, w, lo, hi] {
        try {
          run(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) throw IntegrationError("advect_ensemble: nonfinite particle");
    }
  }
  return snaps;
}

}  // namespace cohset
