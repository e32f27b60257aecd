#include "vortexlab/neumann_heat.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vortexlab/simd_kernels.hpp"
#include "vortexlab/transforms.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::atomic<double> g_time_offset{0.0};

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("heat kernel requires t > 0");
  }
}

// Number of image pairs on each side needed so that the Gaussian at distance
// 2K (the closest neglected image) is below tail_tol.
int image_count(double t, const KernelParams& p) {
  const double four_nu_t = 4.0 * p.nu * t;
  const double norm = 1.0 / std::sqrt(kPi * four_nu_t);
  const double log_ratio = std::log(std::max(norm / p.tail_tol, 1.0));
  const double reach = std::sqrt(four_nu_t * log_ratio);
  return 1 + static_cast<int>(std::ceil(reach / 2.0));
}

// Terms needed so that the geometric tail after mode K is below tail_tol.
int series_count(double t, const KernelParams& p) {
  const double a = p.nu * kPi * kPi * t;
  int k = 1;
  while (2.0 * std::exp(-a * k * k) / (1.0 - std::exp(-a * (2 * k + 1))) >= p.tail_tol) {
    ++k;
    if (k > 100000) break;
  }
  return k;
}

void require_square(const Domain& d) {
  if (d.kind() != DomainKind::unit_square) {
    throw UnsupportedDomain("closed-form heat kernel is only available on the unit square");
  }
}

std::vector<double> decay_factors(int g, double rate) {
  std::vector<double> e(g);
  for (int k = 0; k < g; ++k) e[k] = std::exp(-rate * k * k);
  return e;
}

ScalarField multiply_spectrum(const ScalarField& f, const std::vector<double>& factor_1d) {
  ScalarField in = f;
  const auto& c = in.ensure_spectrum();
  const int g = f.grid.size();
  std::vector<double> mult(f.grid.count());
  for (int k = 0; k < g; ++k) {
    for (int j = 0; j < g; ++j) mult[static_cast<std::size_t>(k) * g + j] = factor_1d[j] * factor_1d[k];
  }
  std::vector<double> out_c(c.size());
  simd::active().multiply(c, mult, out_c);
  ScalarField out(f.grid);
  spectral::synthesize(out_c, out.values, g, spectral::Basis::cosine, spectral::Basis::cosine);
  out.spectrum = std::move(out_c);
  return out;
}

}  // namespace

void KernelParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
  if (t_switch < 0.0) throw std::invalid_argument("t_switch must be non-negative");
}

double heat_kernel_1d_images(double t, double x, double y, const KernelParams& p) {
  require_positive_time(t);
  const double four_nu_t = 4.0 * p.nu * t;
  const double norm = 1.0 / std::sqrt(kPi * four_nu_t);
  const int K = image_count(t, p);
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    const double d1 = x - y - 2.0 * k;
    const double d2 = x + y - 2.0 * k;
    sum += std::exp(-d1 * d1 / four_nu_t) + std::exp(-d2 * d2 / four_nu_t);
  }
  return norm * sum;
}

double heat_kernel_1d_series(double t, double x, double y, const KernelParams& p) {
  require_positive_time(t);
  const double a = p.nu * kPi * kPi * t;
  const int K = series_count(t, p);
  double sum = 0.0;
  for (int k = K; k >= 1; --k) {
    sum += std::cos(k * kPi * x) * std::cos(k * kPi * y) * std::exp(-a * k * k);
  }
  return 1.0 + 2.0 * sum;
}

double heat_kernel_1d(double t, double x, double y, const KernelParams& p) {
  return t <= p.switch_time() ? heat_kernel_1d_images(t, x, y, p)
                              : heat_kernel_1d_series(t, x, y, p);
}

double heat_kernel_1d_dy_images(double t, double x, double y, const KernelParams& p) {
  require_positive_time(t);
  const double two_nu_t = 2.0 * p.nu * t;
  const double four_nu_t = 2.0 * two_nu_t;
  const double norm = 1.0 / std::sqrt(kPi * four_nu_t);
  const int K = image_count(t, p);
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    const double d1 = x - y - 2.0 * k;
    const double d2 = x + y - 2.0 * k;
    sum += d1 * std::exp(-d1 * d1 / four_nu_t) - d2 * std::exp(-d2 * d2 / four_nu_t);
  }
  return norm * sum / two_nu_t;
}

double heat_kernel_1d_dy_series(double t, double x, double y, const KernelParams& p) {
  require_positive_time(t);
  const double a = p.nu * kPi * kPi * t;
  const int K = series_count(t, p) + 2;
  double sum = 0.0;
  for (int k = K; k >= 1; --k) {
    sum += k * kPi * std::cos(k * kPi * x) * std::sin(k * kPi * y) * std::exp(-a * k * k);
  }
  return -2.0 * sum;
}

double heat_kernel_1d_dy(double t, double x, double y, const KernelParams& p) {
  return t <= p.switch_time() ? heat_kernel_1d_dy_images(t, x, y, p)
                              : heat_kernel_1d_dy_series(t, x, y, p);
}

double heat_kernel(double t, Vec2 x, Vec2 y, const KernelParams& p, const Domain& d) {
  require_square(d);
  return heat_kernel_1d(t, x.x, y.x, p) * heat_kernel_1d(t, x.y, y.y, p);
}

Vec2 grad_y_heat_kernel(double t, Vec2 x, Vec2 y, const KernelParams& p, const Domain& d) {
  require_square(d);
  const double px = heat_kernel_1d(t, x.x, y.x, p);
  const double py = heat_kernel_1d(t, x.y, y.y, p);
  return {heat_kernel_1d_dy(t, x.x, y.x, p) * py, px * heat_kernel_1d_dy(t, x.y, y.y, p)};
}

ScalarField apply_semigroup(const ScalarField& f, double t, const KernelParams& p) {
  if (!(t >= 0.0)) throw std::invalid_argument("apply_semigroup requires t >= 0");
  const double shifted = t + g_time_offset.load(std::memory_order_relaxed);
  if (shifted == 0.0) {
    ScalarField out = f;
    out.ensure_spectrum();
    return out;
  }
  return multiply_spectrum(f, decay_factors(f.grid.size(), p.nu * kPi * kPi * shifted));
}

ScalarField fractional_multiplier(const ScalarField& f, double alpha, const KernelParams& p) {
  const int g = f.grid.size();
  ScalarField in = f;
  const auto& c = in.ensure_spectrum();
  std::vector<double> mult(f.grid.count());
  for (int k = 0; k < g; ++k) {
    for (int j = 0; j < g; ++j) {
      const double lambda = p.nu * kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k);
      mult[static_cast<std::size_t>(k) * g + j] = std::pow(1.0 + lambda, 0.5 * alpha);
    }
  }
  std::vector<double> out_c(c.size());
  simd::active().multiply(c, mult, out_c);
  ScalarField out(f.grid);
  spectral::synthesize(out_c, out.values, g, spectral::Basis::cosine, spectral::Basis::cosine);
  out.spectrum = std::move(out_c);
  return out;
}

ScalarField deposit(const PointCloud& pts, NodeGrid grid, Deposition mode) {
  if (pts.x.size() != pts.y.size() || pts.x.size() != pts.w.size()) {
    throw std::invalid_argument("deposit: point cloud arrays differ in length");
  }
  ScalarField out(grid);
  const int g = grid.size();
  const double inv_h = static_cast<double>(g - 1);
  constexpr double kSlack = 1e-12;
  for (std::size_t i = 0; i < pts.x.size(); ++i) {
    const double x = pts.x[i];
    const double y = pts.y[i];
    if (!(x >= -kSlack && x <= 1.0 + kSlack && y >= -kSlack && y <= 1.0 + kSlack)) {
      throw std::invalid_argument("deposit: position outside the closed domain");
    }
    const double w = pts.w[i];
    if (mode == Deposition::nearest) {
      const int a = std::clamp(static_cast<int>(std::lround(x * inv_h)), 0, g - 1);
      const int b = std::clamp(static_cast<int>(std::lround(y * inv_h)), 0, g - 1);
      out.at(a, b) += w / grid.cell(a, b);
      continue;
    }
    const double u = std::clamp(x, 0.0, 1.0) * inv_h;
    const double v = std::clamp(y, 0.0, 1.0) * inv_h;
    const int a = std::min(static_cast<int>(u), g - 2);
    const int b = std::min(static_cast<int>(v), g - 2);
    const double fx = u - a, fy = v - b;
    out.at(a, b) += w * (1.0 - fx) * (1.0 - fy) / grid.cell(a, b);
    out.at(a + 1, b) += w * fx * (1.0 - fy) / grid.cell(a + 1, b);
    out.at(a, b + 1) += w * (1.0 - fx) * fy / grid.cell(a, b + 1);
    out.at(a + 1, b + 1) += w * fx * fy / grid.cell(a + 1, b + 1);
  }
  return out;
}

ScalarField smooth_empirical(const PointCloud& pts, double epsilon, NodeGrid grid,
                             const KernelParams& p, Deposition mode) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("smooth_empirical requires epsilon > 0");
  return apply_semigroup(deposit(pts, grid, mode), epsilon, p);
}

namespace testing {
void set_semigroup_time_offset(double offset) { g_time_offset.store(offset); }
}  // namespace testing

}  // namespace vlab
