#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "vortexlab/expression.hpp"
#include "vortexlab/field.hpp"

namespace vlab {

class CflError : public std::runtime_error {
 public:
  CflError(const std::string& msg, double speed) : std::runtime_error(msg), speed_(speed) {}
  double speed() const { return speed_; }

 private:
  double speed_;
};

struct PdeConfig {
  double nu = 0.1;
  double speed_bound = std::numeric_limits<double>::infinity();  // M; infinity disables F
  Expression omega0;
  Expression g;
  int modes = 64;       // J: cosine modes 0..J per axis
  double dt = 1e-3;
  int output_divisions = 10;
  bool coupled = true;  // evolve omega+ and omega- separately

  void validate() const;
  /// Padded physical grid for products (modes up to 2J resolved exactly).
  int product_grid() const { return 2 * modes + 1; }
};

/// Cosine-series coefficients c[k*(J+1) + j] of cos(j pi x) cos(k pi y).
struct SpectralState {
  int modes = 0;
  double time = 0.0;
  bool coupled = true;
  std::vector<double> pos;  // omega+ (or omega itself when not coupled)
  std::vector<double> neg;  // omega-, empty when not coupled

  std::vector<double> omega() const;
};

/// nu * int_{boundary} phi_jk g_t dsigma for the L2-normalised Neumann
/// cosine basis phi_jk (phi_00 = 1), indexed [k*(J+1) + j]. Composite
/// 8-point Gauss-Legendre along each edge, one panel per wavelength of mode J.
std::vector<double> project_boundary_source(const Expression& g, double t, int modes, double nu,
                                            int part = 0);

/// Initial coefficients from omega0 (part = +1 / -1 selects the positive or
/// negative part, 0 the signed datum), sampled on a 4x finer grid.
std::vector<double> project_initial_datum(const Expression& omega0, int modes, int part = 0);

/// Samples a cosine series on a node grid.
ScalarField evaluate_series(const std::vector<double>& coeffs, int modes, NodeGrid grid);

/// -div(F(u) f) projected on the cosine modes, with u the velocity of
/// omega_nodes. Exposed for diagnostics: its (0,0) entry vanishes.
std::vector<double> transport_term(const std::vector<double>& field_coeffs,
                                   const std::vector<double>& omega_coeffs, int modes,
                                   double speed_bound, double* max_speed = nullptr);

/// Pseudo-spectral stepper: diffusion integrated exactly, transport by
/// integrating-factor Adams-Bashforth 2 (Euler on the first step), boundary
/// source evaluated at the step midpoint and integrated exactly.
class PdeSolver {
 public:
  explicit PdeSolver(PdeConfig config);

  const SpectralState& state() const { return state_; }
  const PdeConfig& config() const { return config_; }
  /// Largest pre-cutoff speed seen at the start of any step so far.
  double velocity_bound() const { return velocity_bound_; }

  void step_imex();
  /// Speed of the current state, without stepping.
  double current_speed() const;

  double l2_norm_sq() const;
  double gradient_norm_sq() const;

 private:
  std::vector<double> source_rate(double t, int part) const;

  PdeConfig config_;
  SpectralState state_;
  std::vector<double> decay_;       // exp(-lambda dt)
  std::vector<double> phi1_dt_;     // (1 - exp(-lambda dt)) / lambda
  std::vector<double> prev_pos_, prev_neg_;
  bool have_prev_ = false;
  bool static_source_ = false;
  std::vector<double> cached_src_pos_, cached_src_neg_;
  double velocity_bound_ = 0.0;
};

struct EnergySample {
  double time = 0.0;
  double l2_sq = 0.0;
  double dissipation = 0.0;  // int_0^t ||grad omega||^2
};

struct PdeSolution {
  int modes = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> coefficients;  // omega = omega+ - omega-
  std::vector<std::vector<double>> coefficients_neg;  // omega-, coupled runs only
  double velocity_bound = 0.0;
  std::vector<EnergySample> energy;

  std::vector<ScalarField> snapshots(NodeGrid grid) const;
};

PdeSolution solve(const PdeConfig& config);

}  // namespace vlab
