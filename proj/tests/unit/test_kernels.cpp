#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cohset/flow.hpp"
#include "cohset/kernels/advect.hpp"

using namespace cohset;

namespace {

// Independent reference: RK4 of the 5D system straight from the field
// definitions, one particle at a time.
FlowState reference_flow(const FlowSystem& sys, FlowState s, int steps) {
  using F = std::array<double, 5>;
  auto rhs = [&](const F& u) {
    const Vec3 dz = lorenz_rhs(sys.lorenz, {u[0], u[1], u[2]});
    const auto dw = wave_rhs(sys.wave, sys.wave.phase_scale * u[0], u[3], u[4]);
    return F{dz[0], dz[1], dz[2], dw[0], dw[1]};
  };
  F u{s.z[0], s.z[1], s.z[2], s.x, s.y};
  const double h = sys.h;
  for (int i = 0; i < steps; ++i) {
    auto add = [](const F& a, double c, const F& b) {
      F r;
      for (int j = 0; j < 5; ++j) r[j] = a[j] + c * b[j];
      return r;
    };
    const F k1 = rhs(u);
    const F k2 = rhs(add(u, h / 2, k1));
    const F k3 = rhs(add(u, h / 2, k2));
    const F k4 = rhs(add(u, h, k3));
    for (int j = 0; j < 5; ++j) u[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    u[4] = std::clamp(u[4], 0.0, std::numbers::pi);
    u[3] -= 2 * std::numbers::pi * std::floor(u[3] / (2 * std::numbers::pi));
  }
  return {{u[0], u[1], u[2]}, u[3], u[4]};
}

Ensemble random_ensemble(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 2 * std::numbers::pi), uy(0.0, std::numbers::pi);
  Ensemble e;
  for (std::size_t i = 0; i < n; ++i) {
    e.x.push_back(ux(rng));
    e.y.push_back(uy(rng));
  }
  // a few wall points
  e.x.push_back(1.0);
  e.y.push_back(0.0);
  e.x.push_back(5.0);
  e.y.push_back(std::numbers::pi);
  return e;
}

}  // namespace

TEST_CASE("scalar kernel matches a direct RK4 of the field") {
  const FlowSystem sys = FlowSystem::perturbed_wave();
  const Ensemble e = random_ensemble(40, 7);
  const double rec[] = {2.0};
  const auto out = advect_ensemble(sys, sys.z_init, e, rec, KernelKind::scalar, 1);
  for (std::size_t i = 0; i < e.x.size(); ++i) {
    const FlowState r = reference_flow(sys, {sys.z_init, e.x[i], e.y[i]}, 200);
    double dx = out[0].x[i] - r.x;
    dx -= 2 * std::numbers::pi * std::round(dx / (2 * std::numbers::pi));
    CHECK(std::abs(dx) < 1e-11);
    CHECK(std::abs(out[0].y[i] - r.y) < 1e-11);
  }
}

TEST_CASE("snapshots agree with flow()") {
  const FlowSystem sys = FlowSystem::perturbed_wave();
  const Ensemble e = random_ensemble(10, 3);
  const double rec[] = {0.0, 0.7, 1.5};
  const auto out = advect_ensemble(sys, sys.z_init, e, rec, KernelKind::scalar, 2);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t i = 0; i < e.x.size(); ++i) {
      const FlowState s = flow(sys, 0.0, rec[r], {sys.z_init, e.x[i], e.y[i]});
      CHECK(std::abs(out[r].x[i] - s.x) < 1e-12);
      CHECK(std::abs(out[r].y[i] - s.y) < 1e-12);
    }
  }
}

TEST_CASE("kernel selection") {
  CHECK(kernel_preference_from_string("auto") == KernelPreference::automatic);
  CHECK(select_kernel(KernelPreference::scalar) == KernelKind::scalar);
  CHECK_THROWS(kernel_preference_from_string("neon"));
  if (avx2_available()) CHECK(select_kernel(KernelPreference::avx2) == KernelKind::avx2);
}

TEST_CASE("avx2 sincos accuracy") {
  if (!avx2_available()) return;
  std::vector<double> in;
  for (int i = -20000; i <= 20000; ++i) in.push_back(i * 1e-3);
  for (double v : {1e-300, -0.0, 0.0, 1e5, std::numbers::pi, -std::numbers::pi / 2, 710.0}) in.push_back(v);
  while (in.size() % 4 != 0) in.push_back(0.25);
  std::vector<double> s(in.size()), c(in.size());
  simd::sincos_avx2(in, s, c);
  double worst = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    worst = std::max(worst, std::abs(s[i] - std::sin(in[i])));
    worst = std::max(worst, std::abs(c[i] - std::cos(in[i])));
  }
  CHECK(worst < 1e-15);
}

TEST_CASE("avx2 and scalar kernels agree") {
  if (!avx2_available()) return;
  for (FlowSystem sys : {FlowSystem::perturbed_wave(), FlowSystem::lorenz_wave()}) {
    const Ensemble e = random_ensemble(1001, 11);  // not a multiple of four
    const double rec[] = {0.5, 1.0};
    const auto a = advect_ensemble(sys, sys.z_init, e, rec, KernelKind::scalar, 1);
    const auto b = advect_ensemble(sys, sys.z_init, e, rec, KernelKind::avx2, 1);
    double worst = 0;
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t i = 0; i < e.x.size(); ++i) {
        double dx = a[r].x[i] - b[r].x[i];
        dx -= 2 * std::numbers::pi * std::round(dx / (2 * std::numbers::pi));
        worst = std::max({worst, std::abs(dx), std::abs(a[r].y[i] - b[r].y[i])});
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const FlowSystem sys = FlowSystem::perturbed_wave();
  const Ensemble e = random_ensemble(517, 5);
  const double rec[] = {1.0};
  std::vector<KernelKind> kinds{KernelKind::scalar};
  if (avx2_available()) kinds.push_back(KernelKind::avx2);
  for (KernelKind k : kinds) {
    const auto one = advect_ensemble(sys, sys.z_init, e, rec, k, 1);
    for (unsigned w : {2u, 3u, 8u}) {
      const auto many = advect_ensemble(sys, sys.z_init, e, rec, k, w);
      CHECK(many[0].x == one[0].x);
      CHECK(many[0].y == one[0].y);
    }
  }
}
