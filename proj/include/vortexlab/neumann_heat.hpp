#pragma once

#include <span>

#include "vortexlab/field.hpp"
#include "vortexlab/geometry.hpp"

namespace vlab {

struct KernelParams {
  double nu = 1.0;
  double tail_tol = 1e-12;
  /// Image sums are used for t <= t_switch, the cosine series above it.
  /// Zero selects 0.05/nu, where both need well under 20 terms.
  double t_switch = 0.0;

  double switch_time() const { return t_switch > 0.0 ? t_switch : 0.05 / nu; }
  void validate() const;
};

// ---- 1D Neumann heat kernel on [0,1] -------------------------------------

double heat_kernel_1d(double t, double x, double y, const KernelParams& params);
/// Method of images: sum_k phi(x-y-2k) + phi(x+y-2k).
double heat_kernel_1d_images(double t, double x, double y, const KernelParams& params);
/// Eigen-expansion: 1 + 2 sum_k cos(k pi x) cos(k pi y) exp(-nu k^2 pi^2 t).
double heat_kernel_1d_series(double t, double x, double y, const KernelParams& params);

/// d/dy of the 1D kernel.
double heat_kernel_1d_dy(double t, double x, double y, const KernelParams& params);
double heat_kernel_1d_dy_images(double t, double x, double y, const KernelParams& params);
double heat_kernel_1d_dy_series(double t, double x, double y, const KernelParams& params);

// ---- 2D kernel on the unit square (tensor product) -----------------------

double heat_kernel(double t, Vec2 x, Vec2 y, const KernelParams& params,
                   const Domain& domain = Domain::unit_square());
Vec2 grad_y_heat_kernel(double t, Vec2 x, Vec2 y, const KernelParams& params,
                        const Domain& domain = Domain::unit_square());

// ---- Semigroup on grid fields -------------------------------------------

/// Spectral multiplier exp(-nu pi^2 (j^2+k^2) t) on cosine coefficients.
ScalarField apply_semigroup(const ScalarField& f, double t, const KernelParams& params);

/// Coefficient-wise (1 + nu pi^2 (j^2+k^2))^(alpha/2), i.e. (I + A)^(alpha/2).
ScalarField fractional_multiplier(const ScalarField& f, double alpha, const KernelParams& params);

enum class Deposition { nearest, bilinear };

/// Weighted point set in structure-of-arrays form.
struct PointCloud {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> w;
};

/// Node field whose trapezoidal mass equals sum of weights exactly (up to
/// rounding). Accumulates in point order.
ScalarField deposit(const PointCloud& points, NodeGrid grid, Deposition mode);

/// P_eps applied to the weighted empirical measure, sampled on the grid.
ScalarField smooth_empirical(const PointCloud& points, double epsilon, NodeGrid grid,
                             const KernelParams& params,
                             Deposition mode = Deposition::nearest);

namespace testing {
/// Fault-injection hook for self-test coverage: adds a fixed time offset to
/// every semigroup multiplier, which breaks the semigroup property. Zero
/// restores normal behaviour.
void set_semigroup_time_offset(double offset);
}  // namespace testing

}  // namespace vlab
