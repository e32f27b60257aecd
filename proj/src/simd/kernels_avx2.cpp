// Compiled with -mavx2 (and without FMA). Only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "vortexlab/simd_kernels.hpp"

namespace vlab::simd {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i])));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

inline double fold(double c) {
  c = std::fabs(c);
  return c > 1.0 ? 2.0 - c : c;
}

inline __m256d fold_pd(__m256d c) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d a = abs_pd(c);
  const __m256d over = _mm256_cmp_pd(a, one, _CMP_GT_OQ);
  return _mm256_blendv_pd(a, _mm256_sub_pd(_mm256_set1_pd(2.0), a), over);
}

inline __m256d envelope_ok(__m256d c) {
  const __m256d lo = _mm256_cmp_pd(c, _mm256_set1_pd(-1.0), _CMP_GE_OQ);
  const __m256d hi = _mm256_cmp_pd(c, _mm256_set1_pd(2.0), _CMP_LE_OQ);
  return _mm256_and_pd(lo, hi);
}

std::size_t advance_square(const AdvanceBatch& s) {
  const std::size_t n = s.x.size();
  std::size_t first_bad = n;
  const __m256d dt = _mm256_set1_pd(s.dt);
  const __m256d sigma = _mm256_set1_pd(s.sigma);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d cx = _mm256_add_pd(
        _mm256_add_pd(_mm256_loadu_pd(&s.x[i]), _mm256_mul_pd(_mm256_loadu_pd(&s.drift_x[i]), dt)),
        _mm256_mul_pd(sigma, _mm256_loadu_pd(&s.noise_x[i])));
    const __m256d cy = _mm256_add_pd(
        _mm256_add_pd(_mm256_loadu_pd(&s.y[i]), _mm256_mul_pd(_mm256_loadu_pd(&s.drift_y[i]), dt)),
        _mm256_mul_pd(sigma, _mm256_loadu_pd(&s.noise_y[i])));
    if (first_bad == n) {
      const int ok = _mm256_movemask_pd(_mm256_and_pd(envelope_ok(cx), envelope_ok(cy)));
      if (ok != 0xF) first_bad = i + static_cast<std::size_t>(std::countr_one(static_cast<unsigned>(ok)));
    }
    const __m256d px = fold_pd(cx);
    const __m256d py = fold_pd(cy);
    const __m256d dx = _mm256_sub_pd(px, cx);
    const __m256d dy = _mm256_sub_pd(py, cy);
    const __m256d len = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    _mm256_storeu_pd(&s.reflection_total[i],
                     _mm256_add_pd(_mm256_loadu_pd(&s.reflection_total[i]), len));
    _mm256_storeu_pd(&s.x[i], px);
    _mm256_storeu_pd(&s.y[i], py);
  }
  for (; i < n; ++i) {
    const double cx = (s.x[i] + s.drift_x[i] * s.dt) + s.sigma * s.noise_x[i];
    const double cy = (s.y[i] + s.drift_y[i] * s.dt) + s.sigma * s.noise_y[i];
    const bool ok = cx >= -1.0 && cx <= 2.0 && cy >= -1.0 && cy <= 2.0;
    if (first_bad == n && !ok) first_bad = i;
    const double px = fold(cx);
    const double py = fold(cy);
    const double dx = px - cx;
    const double dy = py - cy;
    s.reflection_total[i] += std::sqrt(dx * dx + dy * dy);
    s.x[i] = px;
    s.y[i] = py;
  }
  return first_bad;
}

void cutoff(std::span<double> vx, std::span<double> vy, double m) {
  const std::size_t n = vx.size();
  const __m256d bound = _mm256_set1_pd(m);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(&vx[i]);
    const __m256d y = _mm256_loadu_pd(&vy[i]);
    const __m256d mag = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
    const __m256d over = _mm256_cmp_pd(mag, bound, _CMP_GT_OQ);
    const __m256d scale = _mm256_div_pd(bound, mag);
    _mm256_storeu_pd(&vx[i], _mm256_blendv_pd(x, _mm256_mul_pd(x, scale), over));
    _mm256_storeu_pd(&vy[i], _mm256_blendv_pd(y, _mm256_mul_pd(y, scale), over));
  }
  for (; i < n; ++i) {
    const double mag = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]);
    if (mag > m) {
      const double s = m / mag;
      vx[i] *= s;
      vy[i] *= s;
    }
  }
}

double max_norm(std::span<const double> vx, std::span<const double> vy) {
  const std::size_t n = vx.size();
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(&vx[i]);
    const __m256d y = _mm256_loadu_pd(&vy[i]);
    best = _mm256_max_pd(best,
                         _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y))));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, best);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) out = std::max(out, std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]));
  return out;
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table{Isa::avx2, "avx2", &multiply, &advance_square, &cutoff,
                                 &max_norm};
  return &table;
}

}  // namespace vlab::simd
