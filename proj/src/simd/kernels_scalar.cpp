#include <algorithm>
#include <cmath>

#include "vortexlab/simd_kernels.hpp"

namespace vlab::simd {

namespace {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

inline double fold(double c) {
  c = std::fabs(c);
  return c > 1.0 ? 2.0 - c : c;
}

inline bool in_envelope(double c) { return c >= -1.0 && c <= 2.0; }

std::size_t advance_square(const AdvanceBatch& s) {
  const std::size_t n = s.x.size();
  std::size_t first_bad = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = (s.x[i] + s.drift_x[i] * s.dt) + s.sigma * s.noise_x[i];
    const double cy = (s.y[i] + s.drift_y[i] * s.dt) + s.sigma * s.noise_y[i];
    if (first_bad == n && !(in_envelope(cx) && in_envelope(cy))) first_bad = i;
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
  for (std::size_t i = 0; i < vx.size(); ++i) {
    const double mag = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]);
    if (mag > m) {
      const double s = m / mag;
      vx[i] *= s;
      vy[i] *= s;
    }
  }
}

double max_norm(std::span<const double> vx, std::span<const double> vy) {
  double best = 0.0;
  for (std::size_t i = 0; i < vx.size(); ++i) {
    best = std::max(best, std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]));
  }
  return best;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, "scalar", &multiply, &advance_square, &cutoff,
                                 &max_norm};
  return table;
}

}  // namespace vlab::simd
