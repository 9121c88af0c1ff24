// Compiled with -mavx2 -mfma when COHSET_HAVE_AVX2 is defined.
#include <algorithm>
#include <cmath>

#include "cohset/errors.hpp"
#include "cohset/kernels/advect.hpp"

#if defined(COHSET_HAVE_AVX2)
#include <immintrin.h>

namespace cohset {

namespace {

// Cody-Waite split of pi/2
constexpr double kPio2Hi = 1.57079625129699707031e+00;
constexpr double kPio2Mid = 7.54978941586159635336e-08;
constexpr double kPio2Lo = 5.39030285815811905290e-15;
constexpr double kTwoOverPi = 0.63661977236758134308;

inline __m256d poly_sin(__m256d r, __m256d z) {
  __m256d p = _mm256_set1_pd(1.58962301576546568060e-10);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.50507477628578072866e-8));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.75573136213857245213e-6));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.98412698295895385996e-4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(8.33333333332211858878e-3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.66666666666666307295e-1));
  return _mm256_fmadd_pd(_mm256_mul_pd(r, z), p, r);
}

inline __m256d poly_cos(__m256d z) {
  __m256d p = _mm256_set1_pd(-1.13585365213876817300e-11);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.08757008419747316778e-9));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.75573141792967388112e-7));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.48015872888517045348e-5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.38888888888730564116e-3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.16666666666665929218e-2));
  const __m256d zz = _mm256_mul_pd(z, z);
  return _mm256_fmadd_pd(zz, p, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d S = poly_sin(r, z);
  const __m256d C = poly_cos(z);

  const __m256i qi = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256d sneg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, two), two));
  const __m256d cneg =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d s = _mm256_blendv_pd(S, C, swap);
  const __m256d c = _mm256_blendv_pd(C, S, swap);
  s_out = _mm256_xor_pd(s, _mm256_and_pd(sneg, sign));
  c_out = _mm256_xor_pd(c, _mm256_and_pd(cneg, sign));
}

struct StageVec {
  __m256d cph, sph, amp, frc;
};

inline StageVec broadcast(const StageForcing& f) {
  return {_mm256_set1_pd(f.cos_phase), _mm256_set1_pd(f.sin_phase), _mm256_set1_pd(f.amplitude),
          _mm256_set1_pd(f.forcing)};
}

inline void field4(const StageVec& f, __m256d drift, __m256d x, __m256d y, __m256d& dx, __m256d& dy) {
  __m256d sx, cx, sy, cy;
  sincos4(x, sx, cx);
  sincos4(y, sy, cy);
  const __m256d s = _mm256_fmsub_pd(sx, f.cph, _mm256_mul_pd(cx, f.sph));
  const __m256d c = _mm256_fmadd_pd(cx, f.cph, _mm256_mul_pd(sx, f.sph));
  const __m256d g = _mm256_fmadd_pd(s, sy, _mm256_fmsub_pd(_mm256_set1_pd(0.5), y,
                                                           _mm256_set1_pd(0.78539816339744830962)));
  const __m256d q = _mm256_fmadd_pd(g, g, _mm256_set1_pd(1.0));
  const __m256d G = _mm256_div_pd(f.frc, _mm256_mul_pd(q, q));
  dx = _mm256_add_pd(_mm256_fnmadd_pd(_mm256_mul_pd(f.amp, s), cy, drift), G);
  dy = _mm256_mul_pd(_mm256_mul_pd(f.amp, c), sy);
}

}  // namespace

void simd::sincos_avx2(std::span<const double> in, std::span<double> s, std::span<double> c) {
  if (s.size() < in.size() || c.size() < in.size()) throw DomainError("sincos_avx2: output too short");
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) {
    __m256d vs, vc;
    sincos4(_mm256_loadu_pd(in.data() + i), vs, vc);
    _mm256_storeu_pd(s.data() + i, vs);
    _mm256_storeu_pd(c.data() + i, vc);
  }
  if (i < in.size()) {
    alignas(32) double buf[4] = {0, 0, 0, 0}, bs[4], bc[4];
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(i), in.end(), buf);
    __m256d vs, vc;
    sincos4(_mm256_load_pd(buf), vs, vc);
    _mm256_store_pd(bs, vs);
    _mm256_store_pd(bc, vc);
    for (std::size_t k = 0; i + k < in.size(); ++k) {
      s[i + k] = bs[k];
      c[i + k] = bc[k];
    }
  }
}

void advect_avx2(const AdvectPlan& plan, AdvectBatch& batch) {
  const std::size_t n = batch.x.size();
  const std::size_t nrec = plan.record_after.size();
  const __m256d drift = _mm256_set1_pd(plan.drift);
  const __m256d period = _mm256_set1_pd(plan.x_period);
  const __m256d inv_period = _mm256_set1_pd(plan.x_period > 0 ? 1.0 / plan.x_period : 0.0);
  const __m256d ylo = _mm256_set1_pd(plan.y_lower);
  const __m256d yhi = _mm256_set1_pd(plan.y_upper);
  const bool wrap = plan.x_period > 0;
  const bool clamp = plan.y_upper > plan.y_lower;
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);

  std::vector<StageVec> stages;
  stages.reserve(plan.steps.size() * 4);
  for (const auto& st : plan.steps) {
    for (const auto& f : st.stages) stages.push_back(broadcast(f));
  }

  for (std::size_t i = 0; i < n; i += 4) {
    const std::size_t lanes = std::min<std::size_t>(4, n - i);
    // short tails are padded with the last particle so every lane runs the
    // same arithmetic regardless of where the batch was split
    alignas(32) double bx[4], by[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t src = i + std::min(k, lanes - 1);
      bx[k] = batch.x[src];
      by[k] = batch.y[src];
    }
    __m256d x = _mm256_load_pd(bx);
    __m256d y = _mm256_load_pd(by);

    auto record = [&](std::size_t r) {
      _mm256_store_pd(bx, x);
      _mm256_store_pd(by, y);
      for (std::size_t k = 0; k < lanes; ++k) {
        batch.snap_x[r][i + k] = bx[k];
        batch.snap_y[r][i + k] = by[k];
      }
    };

    std::size_t r = 0;
    while (r < nrec && plan.record_after[r] == 0) record(r++);
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
      const __m256d h = _mm256_set1_pd(plan.steps[s].h);
      const __m256d hh = _mm256_mul_pd(half, h);
      const StageVec* sv = &stages[4 * s];
      __m256d k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
      field4(sv[0], drift, x, y, k1x, k1y);
      field4(sv[1], drift, _mm256_fmadd_pd(hh, k1x, x), _mm256_fmadd_pd(hh, k1y, y), k2x, k2y);
      field4(sv[2], drift, _mm256_fmadd_pd(hh, k2x, x), _mm256_fmadd_pd(hh, k2y, y), k3x, k3y);
      field4(sv[3], drift, _mm256_fmadd_pd(h, k3x, x), _mm256_fmadd_pd(h, k3y, y), k4x, k4y);
      const __m256d h6 = _mm256_div_pd(h, _mm256_set1_pd(6.0));
      const __m256d sx = _mm256_add_pd(_mm256_add_pd(k1x, k4x), _mm256_mul_pd(two, _mm256_add_pd(k2x, k3x)));
      const __m256d sy = _mm256_add_pd(_mm256_add_pd(k1y, k4y), _mm256_mul_pd(two, _mm256_add_pd(k2y, k3y)));
      x = _mm256_fmadd_pd(h6, sx, x);
      y = _mm256_fmadd_pd(h6, sy, y);
      if (wrap) {
        x = _mm256_fnmadd_pd(period, _mm256_floor_pd(_mm256_mul_pd(x, inv_period)), x);
        const __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
        x = _mm256_add_pd(x, _mm256_and_pd(neg, period));
        const __m256d over = _mm256_cmp_pd(x, period, _CMP_GE_OQ);
        x = _mm256_andnot_pd(over, x);
      }
      if (clamp) y = _mm256_min_pd(_mm256_max_pd(y, ylo), yhi);
      while (r < nrec && plan.record_after[r] == s + 1) record(r++);
    }
    _mm256_store_pd(bx, x);
    _mm256_store_pd(by, y);
    for (std::size_t k = 0; k < lanes; ++k) {
      batch.x[i + k] = bx[k];
      batch.y[i + k] = by[k];
    }
  }
}

}  // namespace cohset

#else

namespace cohset {

void simd::sincos_avx2(std::span<const double>, std::span<double>, std::span<double>) {
  throw ConfigError("AVX2 kernel not compiled in");
}

void advect_avx2(const AdvectPlan&, AdvectBatch&) { throw ConfigError("AVX2 kernel not compiled in"); }

}  // namespace cohset

#endif
