#include "vortexlab/particle_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vortexlab/rng.hpp"
#include "vortexlab/simd_kernels.hpp"

namespace vlab {

namespace {

constexpr double kGaussNode[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
constexpr double kGaussWeight[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                    0.3478548451374538};
constexpr double kCornerNudge = 1e-9;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what + " evaluation");
}

struct SignedParts {
  double pos = 0.0;
  double neg = 0.0;
  void add(double w, double v) {
    if (v > 0.0) pos += w * v;
    else neg -= w * v;
  }
};

// Cell integral of omega0^+/- over [cx +- half] x [cy +- half], clipped to the domain.
SignedParts interior_cell(const Expression& omega0, const Domain& domain, Vec2 c, double half) {
  SignedParts parts;
  if (domain.kind() == DomainKind::unit_square) {
    for (int p = 0; p < 4; ++p) {
      for (int q = 0; q < 4; ++q) {
        const double x = c.x + half * kGaussNode[p];
        const double y = c.y + half * kGaussNode[q];
        const double v = omega0.eval(x, y);
        require_finite(v, "omega0");
        parts.add(kGaussWeight[p] * kGaussWeight[q] * half * half, v);
      }
    }
    return parts;
  }
  // Disk cells: 4x4 sub-cells, each with Gauss-Legendre and an indicator.
  constexpr int kSub = 4;
  const double sub_half = half / kSub;
  for (int si = 0; si < kSub; ++si) {
    for (int sj = 0; sj < kSub; ++sj) {
      const double sx = c.x - half + (2 * si + 1) * sub_half;
      const double sy = c.y - half + (2 * sj + 1) * sub_half;
      for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
          const Vec2 pt{sx + sub_half * kGaussNode[p], sy + sub_half * kGaussNode[q]};
          if (!domain.contains(pt)) continue;
          const double v = omega0.eval(pt.x, pt.y);
          require_finite(v, "omega0");
          parts.add(kGaussWeight[p] * kGaussWeight[q] * sub_half * sub_half, v);
        }
      }
    }
  }
  return parts;
}

double wrap_unit(double s) {
  s -= std::floor(s);
  return s >= 1.0 ? 0.0 : s;
}

}  // namespace

double GenerationGrid::mass_up_to(double t, int sign) const {
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.birth_time <= t) total += sign > 0 ? e.weight_pos : e.weight_neg;
  }
  return total;
}

GenerationGrid build_generation_grid(int n, const Expression& omega0, const Expression& g,
                                     double nu, const Domain& domain, double tol_boundary) {
  if (n < 2) throw std::invalid_argument("generation grid requires n >= 2");
  GenerationGrid grid;
  grid.n = n;
  const double half = 0.5 / n;

  if (domain.kind() == DomainKind::unit_square) {
    for (int b = 1; b < n; ++b) {
      for (int a = 1; a < n; ++a) {
        const Vec2 zeta{static_cast<double>(a) / n, static_cast<double>(b) / n};
        const auto parts = interior_cell(omega0, domain, zeta, half);
        grid.entries.push_back({0.0, 0, zeta, -1.0, parts.pos, parts.neg});
      }
    }
  } else {
    const int reach = static_cast<int>(std::ceil(domain.radius() * n));
    for (int b = -reach; b <= reach; ++b) {
      for (int a = -reach; a <= reach; ++a) {
        const Vec2 zeta{static_cast<double>(a) / n, static_cast<double>(b) / n};
        if (!(norm(zeta) < domain.radius())) continue;
        const auto parts = interior_cell(omega0, domain, zeta, half);
        grid.entries.push_back({0.0, 0, zeta, -1.0, parts.pos, parts.neg});
      }
    }
  }
  grid.interior_count = grid.entries.size();

  const double speed = domain.perimeter();
  for (int m = 1; m <= n; ++m) {
    const double t_birth = (2.0 * m - 1.0) / (2.0 * n);
    for (int h = 1; h <= n; ++h) {
      const double s_center = static_cast<double>(h) / n;
      SignedParts parts;
      for (int p = 0; p < 4; ++p) {
        const double t = t_birth + half * kGaussNode[p];
        for (int q = 0; q < 4; ++q) {
          const double s = wrap_unit(s_center + half * kGaussNode[q]);
          const Vec2 pos = domain.boundary_map(s).position;
          const double v = g({pos.x, pos.y, t, s});
          require_finite(v, "g");
          parts.add(nu * kGaussWeight[p] * kGaussWeight[q] * half * half * speed, v);
        }
      }
      double s_birth = wrap_unit(s_center);
      if (domain.near_corner(s_birth, tol_boundary)) s_birth = wrap_unit(s_birth + kCornerNudge);
      const Vec2 zeta = domain.boundary_map(s_birth).position;
      grid.entries.push_back({t_birth, m, zeta, s_birth, parts.pos, parts.neg});
    }
  }
  return grid;
}

// ---- SimConfig -------------------------------------------------------------

double SimConfig::epsilon() const { return epsilon_c / std::sqrt(static_cast<double>(n)); }

int SimConfig::grid_size() const {
  if (grid_g > 0) return grid_g;
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(128, 8 * n))));
}

KernelParams SimConfig::kernel_params() const {
  KernelParams p;
  p.nu = nu;
  p.tail_tol = tail_tol;
  return p;
}

void SimConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
  if (!(speed_bound >= 0.0)) throw std::invalid_argument("M must be non-negative");
  if (!(epsilon_c > 0.0)) throw std::invalid_argument("epsilon_c must be positive");
  if (k_sub < 1) throw std::invalid_argument("k_sub must be at least 1");
  if (output_divisions < 1) throw std::invalid_argument("output_divisions must be at least 1");
  const int g = grid_size();
  if (g < 4 || !std::has_single_bit(static_cast<unsigned>(g))) {
    throw std::invalid_argument("grid_g must be a power of two >= 4");
  }
  const double h = 1.0 / (g - 1);
  if (h > epsilon() / 4.0) {
    throw std::invalid_argument("grid too coarse: need 1/(G-1) <= epsilon/4");
  }
  // A Brownian increment of ten standard deviations plus the largest drift
  // must stay inside one fold.
  const double reach = 10.0 * std::sqrt(2.0 * nu * dt()) +
                       (std::isfinite(speed_bound) ? speed_bound * dt() : 0.0);
  if (reach >= 1.0) throw std::invalid_argument("time step too large for single-fold reflection");
}

// ---- State -----------------------------------------------------------------

SimState make_initial_state(const GenerationGrid& grid) {
  SimState s;
  auto& p = s.particles;
  for (std::size_t e = 0; e < grid.entries.size(); ++e) {
    const auto& entry = grid.entries[e];
    for (int sign : {+1, -1}) {
      const double w = sign > 0 ? entry.weight_pos : entry.weight_neg;
      if (!(w > 0.0)) continue;
      p.birth_time.push_back(entry.birth_time);
      p.zeta_x.push_back(entry.birth_point.x);
      p.zeta_y.push_back(entry.birth_point.y);
      p.weight.push_back(w);
      p.sign.push_back(sign);
      p.stream.push_back(2 * static_cast<std::uint64_t>(e) + (sign < 0 ? 1 : 0));
      p.x.push_back(entry.birth_point.x);
      p.y.push_back(entry.birth_point.y);
      p.reflection_total.push_back(0.0);
    }
  }
  return s;
}

std::vector<std::size_t> active_set(const SimState& state, double t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    if (state.particles.birth_time[i] <= t) out.push_back(i);
  }
  return out;
}

void activate_births(SimState& state, double t) {
  const auto& bt = state.particles.birth_time;
  while (state.active < bt.size() && bt[state.active] <= t) ++state.active;
}

void step(SimState& state, double dt, std::span<const double> drift_x,
          std::span<const double> drift_y, double nu, std::uint64_t seed, const Domain& domain) {
  const std::size_t n = state.active;
  if (drift_x.size() != n || drift_y.size() != n) {
    throw std::invalid_argument("step: drift arrays must cover the active set");
  }
  auto& p = state.particles;
  std::vector<double> noise_x(n), noise_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = rng::gaussian_pair(seed, p.stream[i], state.step_index);
    noise_x[i] = z.a;
    noise_y[i] = z.b;
  }
  const double sigma = std::sqrt(2.0 * nu * dt);
  if (domain.kind() == DomainKind::unit_square) {
    const simd::AdvanceBatch batch{std::span(p.x).first(n),
                                   std::span(p.y).first(n),
                                   std::span(p.reflection_total).first(n),
                                   drift_x,
                                   drift_y,
                                   noise_x,
                                   noise_y,
                                   dt,
                                   sigma};
    const std::size_t bad = simd::active().advance_square(batch);
    if (bad != n) {
      throw ReflectionEnvelopeError("particle " + std::to_string(bad) +
                                    " left the single-fold envelope; reduce the time step");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 c{(p.x[i] + drift_x[i] * dt) + sigma * noise_x[i],
                   (p.y[i] + drift_y[i] * dt) + sigma * noise_y[i]};
      const Reflection r = domain.reflect(c);
      p.x[i] = r.position.x;
      p.y[i] = r.position.y;
      p.reflection_total[i] += norm(r.displacement);
    }
  }
  ++state.step_index;
  state.time += dt;
}

ScalarField smoothed_field(const SimState& state, const SimConfig& config) {
  if (config.domain.kind() != DomainKind::unit_square) {
    throw UnsupportedDomain("grid smoothing is only available on the unit square");
  }
  const auto& p = state.particles;
  const std::size_t n = state.active;
  const NodeGrid grid(config.grid_size());
  const KernelParams kp = config.kernel_params();
  const double eps = config.epsilon();

  if (config.bookkeeping == Bookkeeping::signed_) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = p.sign[i] * p.weight[i];
    const PointCloud cloud{std::span(p.x).first(n), std::span(p.y).first(n), w};
    return smooth_empirical(cloud, eps, grid, kp, config.deposition);
  }

  ScalarField total(grid);
  bool have_any = false;
  for (int sign : {+1, -1}) {
    std::vector<double> xs, ys, ws;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.sign[i] != sign) continue;
      xs.push_back(p.x[i]);
      ys.push_back(p.y[i]);
      ws.push_back(p.weight[i]);
    }
    if (ws.empty()) continue;
    const ScalarField part = smooth_empirical({xs, ys, ws}, eps, grid, kp, config.deposition);
    total = have_any ? (sign > 0 ? total + part : total - part) : (sign > 0 ? part : -1.0 * part);
    have_any = true;
  }
  return total;
}

// ---- Run -------------------------------------------------------------------

double OutputRecord::ledger_gap() const {
  return std::max(std::fabs(active_mass_pos - ledger_mass_pos),
                  std::fabs(active_mass_neg - ledger_mass_neg));
}

double RunResult::max_ledger_gap() const {
  double gap = 0.0;
  for (const auto& o : outputs) gap = std::max(gap, o.ledger_gap());
  return gap;
}

RunResult run(const SimConfig& config) {
  RunResult result;
  try {
    config.validate();
    if (config.domain.kind() != DomainKind::unit_square) {
      throw UnsupportedDomain("particle runs need the grid semigroup, available on the unit square only");
    }
    result.epsilon = config.epsilon();
    result.grid_g = config.grid_size();
    const GenerationGrid gen = build_generation_grid(config.n, config.omega0, config.g, config.nu,
                                                     config.domain, config.tol_boundary);
    SimState state = make_initial_state(gen);

    // Integer time ticks: steps, births and outputs all land on multiples.
    const std::int64_t steps_per_unit = 2LL * config.n * config.k_sub;
    const std::int64_t ticks = std::lcm(steps_per_unit, static_cast<std::int64_t>(config.output_divisions));
    const std::int64_t step_ticks = ticks / steps_per_unit;
    const std::int64_t output_ticks = ticks / config.output_divisions;
    const double tick = 1.0 / static_cast<double>(ticks);
    const bool linear = config.speed_bound == 0.0;

    std::int64_t now = 0;
    activate_births(state, 0.0);
    for (;;) {
      const bool is_output = now % output_ticks == 0;
      const bool at_end = now == ticks;
      ScalarField field;
      if (is_output || !linear) field = smoothed_field(state, config);

      if (is_output) {
        OutputRecord rec;
        rec.time = static_cast<double>(now) / static_cast<double>(ticks);
        rec.active_count = state.active;
        for (std::size_t i = 0; i < state.active; ++i) {
          if (state.particles.sign[i] > 0) rec.active_mass_pos += state.particles.weight[i];
          else rec.active_mass_neg += state.particles.weight[i];
        }
        rec.ledger_mass_pos = gen.mass_up_to(rec.time, +1);
        rec.ledger_mass_neg = gen.mass_up_to(rec.time, -1);
        rec.field_mass = field.mass();
        result.outputs.push_back(rec);
        result.times.push_back(rec.time);
        result.snapshots.push_back(field);
      }
      if (at_end) break;

      const std::int64_t next_step = (now / step_ticks + 1) * step_ticks;
      const std::int64_t next_output = (now / output_ticks + 1) * output_ticks;
      const std::int64_t next = std::min(next_step, next_output);
      const double dt = static_cast<double>(next - now) * tick;

      const std::size_t n_active = state.active;
      const std::span<const double> px = std::span(state.particles.x).first(n_active);
      const std::span<const double> py = std::span(state.particles.y).first(n_active);
      if (linear) {
        const std::vector<double> zero(n_active, 0.0);
        step(state, dt, zero, zero, config.nu, config.seed, config.domain);
        result.step_max_speed.push_back(0.0);
      } else {
        const DriftResult drift = drift_from_field(field, px, py, config.speed_bound);
        result.step_max_speed.push_back(drift.max_speed);
        result.max_speed = std::max(result.max_speed, drift.max_speed);
        step(state, dt, drift.ux, drift.uy, config.nu, config.seed, config.domain);
      }
      now = next;
      // exact rational time avoids drift in the birth comparison
      state.time = static_cast<double>(now) / static_cast<double>(ticks);
      activate_births(state, state.time);
    }
    result.final_state = std::move(state);
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

}  // namespace vlab
