#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cohset/errors.hpp"
#include "cohset/flow.hpp"

using namespace cohset;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("lorenz rhs") {
  const LorenzParams p;
  const Vec3 zero = lorenz_rhs(p, {0, 0, 0});
  for (double v : zero) CHECK(v == 0.0);
  const Vec3 v = lorenz_rhs(p, {0, 1, 1.5});
  CHECK(v[0] == doctest::Approx(10.0 / 6.6685).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(-1.0 / 6.6685).epsilon(1e-14));
  CHECK(v[2] == doctest::Approx(-4.0 / 6.6685).epsilon(1e-14));

  // divergence of the unscaled field, by central differences
  LorenzParams u = p;
  u.tau = 1.0;
  const double d = 1e-5;
  for (const Vec3& z : {Vec3{1, 2, 3}, Vec3{-7, 4, 20}, Vec3{0.3, -9, 31}}) {
    double div = 0;
    for (int i = 0; i < 3; ++i) {
      Vec3 a = z, b = z;
      a[i] += d;
      b[i] -= d;
      div += (lorenz_rhs(u, a)[i] - lorenz_rhs(u, b)[i]) / (2 * d);
    }
    CHECK(div == doctest::Approx(-(10.0 + 1.0 + 8.0 / 3.0)).epsilon(1e-8));
  }
}

TEST_CASE("wave rhs") {
  const WaveParams w = FlowSystem::lorenz_wave().wave;
  const auto a = wave_rhs(w, 0.0, kPi / 2, kPi / 2);
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(std::abs(a[1]) < 1e-15);

  WaveParams pw = FlowSystem::perturbed_wave().wave;
  for (double zt : {-3.0, 0.0, 1.7, 40.0}) {
    for (double x : {0.0, 1.0, 4.0}) {
      CHECK(wave_rhs(w, zt, x, 0.0)[1] == 0.0);
      CHECK(std::abs(wave_rhs(pw, zt, x, 0.0)[1]) == 0.0);
      CHECK(std::abs(wave_rhs(pw, zt, x, kPi)[1]) < 1e-15);
    }
  }

  pw.eps = 0.0;
  for (double zt : {-3.0, 0.5, 12.0}) {
    const auto p = wave_rhs(pw, zt, 1.1, 0.7, true);
    const auto q = wave_rhs(pw, zt, 1.1, 0.7, false);
    CHECK(p[0] == q[0]);
    CHECK(p[1] == q[1]);
  }
}

TEST_CASE("flow basics") {
  const FlowSystem sys = FlowSystem::perturbed_wave();
  const FlowState s0{sys.z_init, 1.0, 2.0};
  const FlowState same = flow(sys, 0.0, 0.0, s0);
  CHECK(same.x == s0.x);
  CHECK(same.y == s0.y);
  CHECK(same.z == s0.z);
  CHECK_THROWS_AS(flow(sys, 0.0, -1.0, s0), DomainError);

  // semigroup
  const FlowState whole = flow(sys, 0.0, 3.0, s0);
  const FlowState halves = flow(sys, 1.2, 1.8, flow(sys, 0.0, 1.2, s0));
  CHECK(std::abs(whole.x - halves.x) < 1e-9);
  CHECK(std::abs(whole.y - halves.y) < 1e-9);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(whole.z[i] - halves.z[i]) < 1e-9);

  // partial last step lands on the endpoint
  const FlowState partial = flow(sys, 0.0, 0.015, s0);
  FlowSystem half = sys;
  half.h = 0.005;
  const FlowState ref = flow(half, 0.0, 0.015, s0);
  CHECK(std::abs(partial.x - ref.x) < 1e-8);
}

TEST_CASE("flow images stay in the cylinder") {
  const FlowSystem sys = FlowSystem::perturbed_wave();
  for (int i = 0; i < 12; ++i) {
    const FlowState s{sys.z_init, 0.5 * i, kPi * i / 11.0};
    const FlowState e = flow(sys, 0.0, 5.0, s);
    CHECK(e.x >= 0.0);
    CHECK(e.x < 2 * kPi);
    CHECK(e.y >= 0.0);
    CHECK(e.y <= kPi);
  }
}

namespace {

// Largest endpoint change over a lattice of starts when h is halved.
double halving_change(const FlowSystem& sys) {
  FlowSystem fine = sys;
  fine.h = sys.h / 2;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 10; ++j) {
      const FlowState s{sys.z_init, 2 * kPi * (i + 0.5) / 20, kPi * (j + 0.5) / 10};
      const FlowState a = flow(sys, 0.0, 10.0, s);
      const FlowState b = flow(fine, 0.0, 10.0, s);
      double dx = a.x - b.x;
      dx -= 2 * kPi * std::round(dx / (2 * kPi));
      worst = std::max({worst, std::abs(dx), std::abs(a.y - b.y)});
      for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a.z[k] - b.z[k]));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("step halving: unperturbed wave") {
  const double d = halving_change(FlowSystem::lorenz_wave());
  MESSAGE("largest change " << d);
  CHECK(d < 1e-6);
}

TEST_CASE("step halving: perturbed wave") {
  const double d = halving_change(FlowSystem::perturbed_wave());
  MESSAGE("largest change " << d);
  CHECK(d < 1e-6);
}

TEST_CASE("lorenz trajectory stays bounded for 200 time units") {
  const FlowSystem sys;
  Vec3 z = sys.z_init;
  double sup = 0;
  for (int i = 0; i < 20000; ++i) {
    z = lorenz_step(sys.lorenz, z, sys.h);
    for (double v : z) sup = std::max(sup, std::abs(v));
  }
  CHECK(sup < 60.0);
  CHECK(sup > 1.0);  // it does go somewhere
}

TEST_CASE("driving path") {
  FlowSystem sys = FlowSystem::perturbed_wave();
  sys.anchor = -5.0;
  const DrivingPath path(sys);
  CHECK(path.state_at(-5.0) == sys.z_init);

  Vec3 z = sys.z_init;
  for (int i = 0; i < 250; ++i) z = lorenz_step(sys.lorenz, z, sys.h);
  CHECK(path.state_at(-2.5) == z);  // same recursion, bit for bit

  // backward then forward returns close to where it started
  const Vec3 back = path.state_at(-6.0);
  const Vec3 again = flow_driver(sys, back, 1.0);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(again[i] - sys.z_init[i]) < 1e-6);

  // off-grid query is one partial step from the grid
  const Vec3 off = path.state_at(-4.988);
  const Vec3 from_grid = lorenz_step(sys.lorenz, path.state_at(-4.99), 0.002);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(off[i] - from_grid[i]) < 1e-13);
}

TEST_CASE("make_plan validates record offsets") {
  const FlowSystem sys;
  const double ok[] = {0.0, 0.5, 1.0};
  const AdvectPlan plan = make_plan(sys, sys.z_init, 1.0, ok);
  CHECK(plan.steps.size() == 100);
  CHECK(plan.record_after == std::vector<std::size_t>{0, 50, 100});
  const double off_grid[] = {0.123, 1.0};
  CHECK_THROWS_AS(make_plan(sys, sys.z_init, 1.0, off_grid), ConfigError);
  const double unsorted[] = {0.5, 0.2};
  CHECK_THROWS_AS(make_plan(sys, sys.z_init, 0.5, unsorted), ConfigError);
  const double beyond[] = {2.0};
  CHECK_THROWS_AS(make_plan(sys, sys.z_init, 1.0, beyond), DomainError);
}
