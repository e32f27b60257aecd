#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "vortexlab/field.hpp"
#include "vortexlab/geometry.hpp"
#include "vortexlab/neumann_heat.hpp"

namespace vlab {

struct VelocityField {
  NodeGrid grid;
  std::vector<double> ux;
  std::vector<double> uy;

  VelocityField() = default;
  explicit VelocityField(NodeGrid g) : grid(g), ux(g.count(), 0.0), uy(g.count(), 0.0) {}

  Vec2 at(int a, int b) const {
    const auto i = grid.index(a, b);
    return {ux[i], uy[i]};
  }
  /// Bilinear interpolation; p is clamped to the closed square.
  Vec2 interpolate(Vec2 p) const;
  /// Largest node speed.
  double max_speed() const;
};

/// psi with -Laplace(psi) = omega, psi = 0 on the boundary, via sine series.
ScalarField stream_function(const ScalarField& omega);

/// u = grad_perp psi = (d_y psi, -d_x psi), derivatives taken spectrally.
VelocityField velocity(const ScalarField& omega);

/// Spectral divergence d_x u_x + d_y u_y at the nodes, used for diagnostics.
ScalarField divergence(const VelocityField& u);

/// Spectral curl d_x u_y - d_y u_x at the nodes.
ScalarField curl(const VelocityField& u);

/// F(v) = v/|v| (|v| min M); F(0) = 0.
Vec2 cutoff(Vec2 v, double speed_bound);

/// Regularised pair kernel K_n(x, y) = int K(x, z) p_eps(z, y) dz evaluated
/// by trapezoidal quadrature on a quad grid. K(x, .) is the discrete Green
/// response of velocity() at x to node indicator sources, obtained in one
/// sine synthesis per component and cached per evaluation point x.
class PairKernel {
 public:
  PairKernel(NodeGrid quad_grid, double epsilon, KernelParams params);

  Vec2 operator()(Vec2 x, Vec2 y);

 private:
  struct Row {
    std::vector<double> kx;
    std::vector<double> ky;
  };
  const Row& row(Vec2 x);

  NodeGrid grid_;
  double epsilon_;
  KernelParams params_;
  std::map<std::pair<double, double>, Row> rows_;
};

Vec2 pair_kernel_regularized(Vec2 x, Vec2 y, double epsilon, int quad_g, const KernelParams& params);

struct DriftResult {
  std::vector<double> ux;  // after cutoff
  std::vector<double> uy;
  /// max |sum_j w_j K_n(x_i, x_j)| over the evaluation points, before cutoff
  double max_speed = 0.0;
};

/// Velocity of a smoothed field at the given points, then the cutoff.
DriftResult drift_from_field(const ScalarField& smoothed, std::span<const double> x,
                             std::span<const double> y, double speed_bound);

/// sum_j w_j K_n(x_i, x_j) for every point of the cloud, computed as
/// K[P_eps S](x_i) through the grid, followed by the cutoff.
DriftResult mean_field_drift(const PointCloud& particles, double epsilon, NodeGrid grid,
                             double speed_bound, const KernelParams& params,
                             Deposition mode = Deposition::nearest);

}  // namespace vlab
