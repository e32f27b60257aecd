#include "vortexlab/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vortexlab/simd_kernels.hpp"
#include "vortexlab/transforms.hpp"

namespace vlab {

namespace {

using spectral::Basis;
constexpr double kPi = std::numbers::pi;

// Sine-sine coefficients of psi.
std::vector<double> stream_coefficients(const ScalarField& omega) {
  const int g = omega.grid.size();
  std::vector<double> c(omega.grid.count());
  spectral::analyze(omega.values, c, g, Basis::sine, Basis::sine);
  for (int k = 1; k < g - 1; ++k) {
    for (int j = 1; j < g - 1; ++j) {
      c[static_cast<std::size_t>(k) * g + j] /=
          kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k);
    }
  }
  return c;
}

}  // namespace

Vec2 VelocityField::interpolate(Vec2 p) const {
  const int g = grid.size();
  const double inv_h = g - 1;
  const double u = std::clamp(p.x, 0.0, 1.0) * inv_h;
  const double v = std::clamp(p.y, 0.0, 1.0) * inv_h;
  const int a = std::min(static_cast<int>(u), g - 2);
  const int b = std::min(static_cast<int>(v), g - 2);
  const double fx = u - a, fy = v - b;
  const auto i00 = grid.index(a, b), i10 = grid.index(a + 1, b);
  const auto i01 = grid.index(a, b + 1), i11 = grid.index(a + 1, b + 1);
  const double w00 = (1.0 - fx) * (1.0 - fy), w10 = fx * (1.0 - fy);
  const double w01 = (1.0 - fx) * fy, w11 = fx * fy;
  return {w00 * ux[i00] + w10 * ux[i10] + w01 * ux[i01] + w11 * ux[i11],
          w00 * uy[i00] + w10 * uy[i10] + w01 * uy[i01] + w11 * uy[i11]};
}

double VelocityField::max_speed() const { return simd::active().max_norm(ux, uy); }

ScalarField stream_function(const ScalarField& omega) {
  ScalarField psi(omega.grid);
  spectral::synthesize(stream_coefficients(omega), psi.values, omega.grid.size(), Basis::sine,
                       Basis::sine);
  return psi;
}

VelocityField velocity(const ScalarField& omega) {
  const int g = omega.grid.size();
  const auto psi = stream_coefficients(omega);
  std::vector<double> cx(psi.size()), cy(psi.size());
  for (int k = 1; k < g - 1; ++k) {
    for (int j = 1; j < g - 1; ++j) {
      const auto i = static_cast<std::size_t>(k) * g + j;
      cx[i] = psi[i] * k * kPi;
      cy[i] = -psi[i] * j * kPi;
    }
  }
  VelocityField u(omega.grid);
  spectral::synthesize(cx, u.ux, g, Basis::sine, Basis::cosine);
  spectral::synthesize(cy, u.uy, g, Basis::cosine, Basis::sine);
  return u;
}

ScalarField divergence(const VelocityField& u) {
  const int g = u.grid.size();
  std::vector<double> ax(u.grid.count()), ay(u.grid.count());
  spectral::analyze(u.ux, ax, g, Basis::sine, Basis::cosine);
  spectral::analyze(u.uy, ay, g, Basis::cosine, Basis::sine);
  std::vector<double> c(u.grid.count(), 0.0);
  for (int k = 0; k < g; ++k) {
    for (int j = 0; j < g; ++j) {
      const auto i = static_cast<std::size_t>(k) * g + j;
      c[i] = j * kPi * ax[i] + k * kPi * ay[i];
    }
  }
  ScalarField out(u.grid);
  spectral::synthesize(c, out.values, g, Basis::cosine, Basis::cosine);
  return out;
}

ScalarField curl(const VelocityField& u) {
  const int g = u.grid.size();
  // u_x is sine in x / cosine in y; d_y u_x is sine/sine. Likewise for u_y.
  std::vector<double> ax(u.grid.count()), ay(u.grid.count());
  spectral::analyze(u.ux, ax, g, Basis::sine, Basis::cosine);
  spectral::analyze(u.uy, ay, g, Basis::cosine, Basis::sine);
  std::vector<double> c(u.grid.count(), 0.0);
  for (int k = 1; k < g - 1; ++k) {
    for (int j = 1; j < g - 1; ++j) {
      const auto i = static_cast<std::size_t>(k) * g + j;
      c[i] = -j * kPi * ay[i] + k * kPi * ax[i];
    }
  }
  ScalarField out(u.grid);
  spectral::synthesize(c, out.values, g, Basis::sine, Basis::sine);
  return out;
}

Vec2 cutoff(Vec2 v, double m) {
  if (m < 0.0) throw std::invalid_argument("cutoff: speed bound must be non-negative");
  const double mag = norm(v);
  if (mag > m) return (m / mag) * v;
  return v;
}

// ---- Pairwise route --------------------------------------------------------

PairKernel::PairKernel(NodeGrid quad_grid, double epsilon, KernelParams params)
    : grid_(quad_grid), epsilon_(epsilon), params_(params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("pair kernel requires epsilon > 0");
  params_.validate();
}

const PairKernel::Row& PairKernel::row(Vec2 x) {
  const auto key = std::make_pair(x.x, x.y);
  if (auto it = rows_.find(key); it != rows_.end()) return it->second;

  const int g = grid_.size();
  const double inv_h = g - 1;
  const double u = std::clamp(x.x, 0.0, 1.0) * inv_h;
  const double v = std::clamp(x.y, 0.0, 1.0) * inv_h;
  const int a = std::min(static_cast<int>(u), g - 2);
  const int b = std::min(static_cast<int>(v), g - 2);
  const double fx = u - a, fy = v - b;
  const int corner_a[4] = {a, a + 1, a, a + 1};
  const int corner_b[4] = {b, b, b + 1, b + 1};
  const double lambda[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};

  // The response at node c to a unit-mass indicator at interior node z has
  // sine-sine coefficients 4 sin(j pi z1) sin(k pi z2); contracting with the
  // velocity synthesis at c leaves a single sine series in z.
  std::vector<double> ax(grid_.count(), 0.0), ay(grid_.count(), 0.0);
  std::vector<double> sx(g), cx(g), sy(g), cy(g);
  for (int c = 0; c < 4; ++c) {
    const double c1 = grid_.coord(corner_a[c]);
    const double c2 = grid_.coord(corner_b[c]);
    for (int m = 0; m < g; ++m) {
      sx[m] = std::sin(m * kPi * c1);
      cx[m] = std::cos(m * kPi * c1);
      sy[m] = std::sin(m * kPi * c2);
      cy[m] = std::cos(m * kPi * c2);
    }
    for (int k = 1; k < g - 1; ++k) {
      for (int j = 1; j < g - 1; ++j) {
        const auto i = static_cast<std::size_t>(k) * g + j;
        const double inv_lap = 1.0 / (kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k));
        ax[i] += 4.0 * lambda[c] * k * kPi * sx[j] * cy[k] * inv_lap;
        ay[i] -= 4.0 * lambda[c] * j * kPi * cx[j] * sy[k] * inv_lap;
      }
    }
  }
  Row r{std::vector<double>(grid_.count()), std::vector<double>(grid_.count())};
  spectral::synthesize(ax, r.kx, g, Basis::sine, Basis::sine);
  spectral::synthesize(ay, r.ky, g, Basis::sine, Basis::sine);
  return rows_.emplace(key, std::move(r)).first->second;
}

Vec2 PairKernel::operator()(Vec2 x, Vec2 y) {
  const Row& r = row(x);
  const int g = grid_.size();
  std::vector<double> px(g), py(g);
  for (int m = 0; m < g; ++m) {
    px[m] = heat_kernel_1d(epsilon_, grid_.coord(m), y.x, params_);
    py[m] = heat_kernel_1d(epsilon_, grid_.coord(m), y.y, params_);
  }
  double sum_x = 0.0, sum_y = 0.0;
  for (int bz = 1; bz < g - 1; ++bz) {
    double row_x = 0.0, row_y = 0.0;
    for (int az = 1; az < g - 1; ++az) {
      const auto i = grid_.index(az, bz);
      row_x += r.kx[i] * px[az];
      row_y += r.ky[i] * px[az];
    }
    sum_x += row_x * py[bz];
    sum_y += row_y * py[bz];
  }
  const double h = grid_.spacing();
  return {sum_x * h * h, sum_y * h * h};
}

Vec2 pair_kernel_regularized(Vec2 x, Vec2 y, double epsilon, int quad_g, const KernelParams& params) {
  PairKernel k(NodeGrid(quad_g), epsilon, params);
  return k(x, y);
}

// ---- Grid route ------------------------------------------------------------

DriftResult drift_from_field(const ScalarField& smoothed, std::span<const double> x,
                             std::span<const double> y, double speed_bound) {
  if (speed_bound < 0.0) throw std::invalid_argument("speed bound must be non-negative");
  const VelocityField u = velocity(smoothed);
  DriftResult out;
  out.ux.resize(x.size());
  out.uy.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec2 v = u.interpolate({x[i], y[i]});
    out.ux[i] = v.x;
    out.uy[i] = v.y;
  }
  const auto& kernels = simd::active();
  out.max_speed = kernels.max_norm(out.ux, out.uy);
  kernels.cutoff(out.ux, out.uy, speed_bound);
  return out;
}

DriftResult mean_field_drift(const PointCloud& particles, double epsilon, NodeGrid grid,
                             double speed_bound, const KernelParams& params, Deposition mode) {
  const ScalarField smoothed = smooth_empirical(particles, epsilon, grid, params, mode);
  return drift_from_field(smoothed, particles.x, particles.y, speed_bound);
}

}  // namespace vlab
