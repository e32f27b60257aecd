#include "vortexlab/pde_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vortexlab/biot_savart.hpp"
#include "vortexlab/quadrature.hpp"
#include "vortexlab/simd_kernels.hpp"
#include "vortexlab/transforms.hpp"

namespace vlab {

namespace {

using spectral::Basis;
constexpr double kPi = std::numbers::pi;

double select_part(double v, int part) {
  if (part > 0) return v > 0.0 ? v : 0.0;
  if (part < 0) return v < 0.0 ? -v : 0.0;
  return v;
}

std::size_t mode_count(int modes) {
  return static_cast<std::size_t>(modes + 1) * (modes + 1);
}

// Squared L2 norm of cos(j pi x) on [0, 1].
double cos_norm_sq(int j) { return j == 0 ? 1.0 : 0.5; }

// Normalisation n_j of the L2-orthonormal cosine basis.
double basis_scale(int j) { return j == 0 ? 1.0 : std::numbers::sqrt2; }

// Embeds (J+1)^2 coefficients into a P x P spectral array and synthesizes.
std::vector<double> to_nodes(const std::vector<double>& c, int modes, int p) {
  std::vector<double> spec(static_cast<std::size_t>(p) * p, 0.0);
  for (int k = 0; k <= modes; ++k) {
    for (int j = 0; j <= modes; ++j) {
      spec[static_cast<std::size_t>(k) * p + j] = c[static_cast<std::size_t>(k) * (modes + 1) + j];
    }
  }
  std::vector<double> values(spec.size());
  spectral::synthesize(spec, values, p, Basis::cosine, Basis::cosine);
  return values;
}

struct NodeVelocity {
  std::vector<double> ux, uy;
  double max_speed = 0.0;
};

NodeVelocity node_velocity(const std::vector<double>& omega_nodes, int p, double speed_bound) {
  ScalarField w{NodeGrid(p)};
  w.values = omega_nodes;
  VelocityField u = velocity(w);
  NodeVelocity out;
  const auto& isa = simd::active();
  out.max_speed = isa.max_norm(u.ux, u.uy);
  if (std::isfinite(speed_bound)) isa.cutoff(u.ux, u.uy, speed_bound);
  out.ux = std::move(u.ux);
  out.uy = std::move(u.uy);
  return out;
}

// -div(v f) on modes 0..J, with f given at the P nodes.
std::vector<double> divergence_term(const NodeVelocity& v, const std::vector<double>& f, int modes,
                                    int p) {
  const std::size_t count = static_cast<std::size_t>(p) * p;
  std::vector<double> qx(count), qy(count);
  const auto& isa = simd::active();
  isa.multiply(v.ux, f, qx);
  isa.multiply(v.uy, f, qy);
  std::vector<double> ax(count), ay(count);
  spectral::analyze(qx, ax, p, Basis::sine, Basis::cosine);
  spectral::analyze(qy, ay, p, Basis::cosine, Basis::sine);
  std::vector<double> out(mode_count(modes), 0.0);
  for (int k = 0; k <= modes; ++k) {
    for (int j = 0; j <= modes; ++j) {
      const auto src = static_cast<std::size_t>(k) * p + j;
      out[static_cast<std::size_t>(k) * (modes + 1) + j] = -(j * kPi * ax[src] + k * kPi * ay[src]);
    }
  }
  return out;
}

}  // namespace

void PdeConfig::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("pde: nu must be positive");
  if (speed_bound < 0.0 || std::isnan(speed_bound)) {
    throw std::invalid_argument("pde: speed bound M must be >= 0");
  }
  if (modes < 2) throw std::invalid_argument("pde: pde_j must be at least 2");
  if (!(dt > 0.0)) throw std::invalid_argument("pde: pde_dt must be positive");
  if (output_divisions < 1) throw std::invalid_argument("pde: output divisions must be >= 1");
  const double per_output = 1.0 / (output_divisions * dt);
  if (std::abs(per_output - std::round(per_output)) > 1e-9 * per_output) {
    throw std::invalid_argument("pde: pde_dt must divide the output interval");
  }
}

std::vector<double> SpectralState::omega() const {
  if (!coupled) return pos;
  std::vector<double> w(pos.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = pos[i] - neg[i];
  return w;
}

std::vector<double> project_boundary_source(const Expression& g, double t, int modes, double nu,
                                            int part) {
  std::vector<double> b(mode_count(modes), 0.0);
  if (g.is_zero_constant()) return b;
  // one panel per wavelength 2/J of the highest mode, 8 points each
  const int panels = std::max(1, (modes + 1) / 2);
  const QuadratureRule rule = composite_gauss(0.0, 1.0, panels, 8);

  // E[edge][m] = int_0^1 cos(m pi xi) g(edge(xi)) dxi
  enum { bottom, right, top, left };
  std::vector<std::vector<double>> edge(4, std::vector<double>(modes + 1, 0.0));
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double xi = rule.nodes[q];
    const double w = rule.weights[q];
    const double samples[4] = {
        g({xi, 0.0, t, xi / 4.0}),
        g({1.0, xi, t, (1.0 + xi) / 4.0}),
        g({xi, 1.0, t, (3.0 - xi) / 4.0}),
        g({0.0, xi, t, (4.0 - xi) / 4.0}),
    };
    for (int e = 0; e < 4; ++e) {
      if (!std::isfinite(samples[e])) {
        std::ostringstream msg;
        msg << "boundary data g is not finite at t=" << t << ", xi=" << xi;
        throw std::domain_error(msg.str());
      }
      const double v = select_part(samples[e], part) * w;
      if (v == 0.0) continue;
      for (int m = 0; m <= modes; ++m) edge[e][m] += v * std::cos(m * kPi * xi);
    }
  }
  for (int k = 0; k <= modes; ++k) {
    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j <= modes; ++j) {
      const double sj = (j % 2 == 0) ? 1.0 : -1.0;
      const double integral =
          edge[bottom][j] + sk * edge[top][j] + edge[left][k] + sj * edge[right][k];
      b[static_cast<std::size_t>(k) * (modes + 1) + j] =
          nu * basis_scale(j) * basis_scale(k) * integral;
    }
  }
  return b;
}

std::vector<double> project_initial_datum(const Expression& omega0, int modes, int part) {
  std::vector<double> c(mode_count(modes), 0.0);
  if (omega0.is_zero_constant()) return c;
  const int q = 4 * modes + 1;
  const NodeGrid grid(q);
  ScalarField f(grid);
  for (int b = 0; b < q; ++b) {
    for (int a = 0; a < q; ++a) {
      const double v = omega0.eval(grid.coord(a), grid.coord(b));
      if (!std::isfinite(v)) throw std::domain_error("initial datum is not finite");
      f.at(a, b) = select_part(v, part);
    }
  }
  std::vector<double> spec(grid.count());
  spectral::analyze(f.values, spec, q, Basis::cosine, Basis::cosine);
  for (int k = 0; k <= modes; ++k) {
    for (int j = 0; j <= modes; ++j) {
      c[static_cast<std::size_t>(k) * (modes + 1) + j] = spec[static_cast<std::size_t>(k) * q + j];
    }
  }
  return c;
}

ScalarField evaluate_series(const std::vector<double>& coeffs, int modes, NodeGrid grid) {
  const int g = grid.size();
  const int m1 = modes + 1;
  std::vector<double> basis(static_cast<std::size_t>(m1) * g);
  for (int a = 0; a < g; ++a) {
    for (int j = 0; j < m1; ++j) basis[static_cast<std::size_t>(a) * m1 + j] = std::cos(j * kPi * grid.coord(a));
  }
  // row[k][a] = sum_j c[k][j] cos(j pi x_a)
  std::vector<double> row(static_cast<std::size_t>(m1) * g, 0.0);
  for (int k = 0; k < m1; ++k) {
    for (int a = 0; a < g; ++a) {
      double s = 0.0;
      for (int j = 0; j < m1; ++j) {
        s += coeffs[static_cast<std::size_t>(k) * m1 + j] * basis[static_cast<std::size_t>(a) * m1 + j];
      }
      row[static_cast<std::size_t>(k) * g + a] = s;
    }
  }
  ScalarField out(grid);
  for (int b = 0; b < g; ++b) {
    for (int a = 0; a < g; ++a) {
      double s = 0.0;
      for (int k = 0; k < m1; ++k) {
        s += row[static_cast<std::size_t>(k) * g + a] * basis[static_cast<std::size_t>(b) * m1 + k];
      }
      out.at(a, b) = s;
    }
  }
  return out;
}

std::vector<double> transport_term(const std::vector<double>& field_coeffs,
                                   const std::vector<double>& omega_coeffs, int modes,
                                   double speed_bound, double* max_speed) {
  const int p = 2 * modes + 1;
  const auto v = node_velocity(to_nodes(omega_coeffs, modes, p), p, speed_bound);
  if (max_speed != nullptr) *max_speed = v.max_speed;
  return divergence_term(v, to_nodes(field_coeffs, modes, p), modes, p);
}

PdeSolver::PdeSolver(PdeConfig config) : config_(std::move(config)) {
  config_.validate();
  const int m = config_.modes;
  state_.modes = m;
  state_.coupled = config_.coupled;
  if (config_.coupled) {
    state_.pos = project_initial_datum(config_.omega0, m, +1);
    state_.neg = project_initial_datum(config_.omega0, m, -1);
  } else {
    state_.pos = project_initial_datum(config_.omega0, m, 0);
  }
  decay_.resize(mode_count(m));
  phi1_dt_.resize(mode_count(m));
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j <= m; ++j) {
      const double lambda = config_.nu * kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k);
      const auto i = static_cast<std::size_t>(k) * (m + 1) + j;
      decay_[i] = std::exp(-lambda * config_.dt);
      phi1_dt_[i] = lambda == 0.0 ? config_.dt : -std::expm1(-lambda * config_.dt) / lambda;
    }
  }
  static_source_ = !config_.g.depends_on_time();
  if (static_source_) {
    cached_src_pos_ = source_rate(0.0, config_.coupled ? +1 : 0);
    if (config_.coupled) cached_src_neg_ = source_rate(0.0, -1);
  }
}

// Rate of the unnormalised coefficients: n_j n_k b_jk.
std::vector<double> PdeSolver::source_rate(double t, int part) const {
  const int m = config_.modes;
  auto b = project_boundary_source(config_.g, t, m, config_.nu, part);
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j <= m; ++j) {
      b[static_cast<std::size_t>(k) * (m + 1) + j] *= basis_scale(j) * basis_scale(k);
    }
  }
  return b;
}

double PdeSolver::current_speed() const {
  const int p = config_.product_grid();
  return node_velocity(to_nodes(state_.omega(), config_.modes, p), p,
                       std::numeric_limits<double>::infinity())
      .max_speed;
}

void PdeSolver::step_imex() {
  const int m = config_.modes;
  const int p = config_.product_grid();
  const double dt = config_.dt;
  const std::size_t count = mode_count(m);

  const auto omega_nodes = to_nodes(state_.omega(), m, p);
  const NodeVelocity v = node_velocity(omega_nodes, p, config_.speed_bound);
  velocity_bound_ = std::max(velocity_bound_, v.max_speed);
  const double transport_speed = std::min(v.max_speed, config_.speed_bound);
  if (transport_speed * dt > 1.0 / m) {
    std::ostringstream msg;
    msg << "CFL violated at t=" << state_.time << ": |u|_inf=" << v.max_speed
        << " exceeds 1/(J dt)=" << 1.0 / (m * dt);
    throw CflError(msg.str(), v.max_speed);
  }

  const bool transport = config_.speed_bound > 0.0;
  std::vector<double> n_pos(count, 0.0), n_neg;
  if (transport) {
    n_pos = divergence_term(v, config_.coupled ? to_nodes(state_.pos, m, p) : omega_nodes, m, p);
  }
  if (config_.coupled) {
    n_neg.assign(count, 0.0);
    if (transport) n_neg = divergence_term(v, to_nodes(state_.neg, m, p), m, p);
  }

  const double t_mid = state_.time + 0.5 * dt;
  std::vector<double> src_pos, src_neg;
  if (static_source_) {
    src_pos = cached_src_pos_;
    src_neg = cached_src_neg_;
  } else {
    src_pos = source_rate(t_mid, config_.coupled ? +1 : 0);
    if (config_.coupled) src_neg = source_rate(t_mid, -1);
  }

  auto advance = [&](std::vector<double>& c, const std::vector<double>& nl,
                     const std::vector<double>& prev, const std::vector<double>& src) {
    for (std::size_t i = 0; i < count; ++i) {
      const double e = decay_[i];
      double explicit_part;
      if (have_prev_) {
        explicit_part = dt * (1.5 * e * nl[i] - 0.5 * e * e * prev[i]);
      } else {
        explicit_part = dt * e * nl[i];
      }
      c[i] = e * c[i] + explicit_part + phi1_dt_[i] * src[i];
    }
  };
  advance(state_.pos, n_pos, prev_pos_, src_pos);
  if (config_.coupled) advance(state_.neg, n_neg, prev_neg_, src_neg);
  prev_pos_ = std::move(n_pos);
  prev_neg_ = std::move(n_neg);
  have_prev_ = true;
  state_.time += dt;
}

double PdeSolver::l2_norm_sq() const {
  const int m = config_.modes;
  const auto w = state_.omega();
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j <= m; ++j) {
      const double c = w[static_cast<std::size_t>(k) * (m + 1) + j];
      s += c * c * cos_norm_sq(j) * cos_norm_sq(k);
    }
  }
  return s;
}

double PdeSolver::gradient_norm_sq() const {
  const int m = config_.modes;
  const auto w = state_.omega();
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j <= m; ++j) {
      const double c = w[static_cast<std::size_t>(k) * (m + 1) + j];
      s += c * c * kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k) *
           cos_norm_sq(j) * cos_norm_sq(k);
    }
  }
  return s;
}

std::vector<ScalarField> PdeSolution::snapshots(NodeGrid grid) const {
  std::vector<ScalarField> out;
  out.reserve(coefficients.size());
  for (const auto& c : coefficients) out.push_back(evaluate_series(c, modes, grid));
  return out;
}

PdeSolution solve(const PdeConfig& config) {
  PdeSolver solver(config);
  PdeSolution sol;
  sol.modes = config.modes;
  const long steps_per_output = std::lround(1.0 / (config.output_divisions * config.dt));

  auto record_output = [&](int k) {
    sol.times.push_back(static_cast<double>(k) / config.output_divisions);
    sol.coefficients.push_back(solver.state().omega());
    if (config.coupled) sol.coefficients_neg.push_back(solver.state().neg);
  };

  double dissipation = 0.0;
  double grad_prev = solver.gradient_norm_sq();
  sol.energy.push_back({0.0, solver.l2_norm_sq(), 0.0});
  record_output(0);
  for (int k = 1; k <= config.output_divisions; ++k) {
    for (long s = 0; s < steps_per_output; ++s) {
      solver.step_imex();
      const double grad = solver.gradient_norm_sq();
      dissipation += 0.5 * config.dt * (grad_prev + grad);
      grad_prev = grad;
      sol.energy.push_back({solver.state().time, solver.l2_norm_sq(), dissipation});
    }
    record_output(k);
  }
  sol.velocity_bound = std::max(solver.velocity_bound(), solver.current_speed());
  return sol;
}

}  // namespace vlab
