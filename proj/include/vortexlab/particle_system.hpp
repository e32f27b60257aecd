#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vortexlab/biot_savart.hpp"
#include "vortexlab/expression.hpp"
#include "vortexlab/field.hpp"
#include "vortexlab/geometry.hpp"
#include "vortexlab/neumann_heat.hpp"

namespace vlab {

/// One point (t_i, zeta_i) of the space-time generation lattice with the
/// positive and negative parts of the datum integrated over its cell.
struct GenerationEntry {
  double birth_time = 0.0;
  int time_level = 0;          // 0 for interior entries, m = 1..n on the boundary
  Vec2 birth_point;
  double boundary_param = -1;  // s of the birth point, -1 for interior entries
  double weight_pos = 0.0;
  double weight_neg = 0.0;
};

struct GenerationGrid {
  int n = 0;
  std::vector<GenerationEntry> entries;  // interior first, then by time level and arc index
  std::size_t interior_count = 0;

  std::size_t boundary_count() const { return entries.size() - interior_count; }
  /// Sum of weights of entries born at or before t, in entry order.
  double mass_up_to(double t, int sign) const;
};

/// Builds the lattice of mesh 1/n over {0} x D and (0,1] x boundary.
/// Interior weights integrate omega0^+/- over the cells with 4x4
/// Gauss-Legendre; boundary weights integrate nu * g^+/- over time x arc
/// cells, so that boundary particles carry the flux nu * g of the Neumann
/// condition.
GenerationGrid build_generation_grid(int n, const Expression& omega0, const Expression& g,
                                     double nu, const Domain& domain = Domain::unit_square(),
                                     double tol_boundary = 1e-12);

enum class Bookkeeping {
  split,   // separate positive and negative populations, fields combined as w+ - w-
  signed_  // a single population carrying signed weights
};

struct SimConfig {
  Domain domain = Domain::unit_square();
  int n = 8;
  double nu = 0.1;
  double speed_bound = std::numeric_limits<double>::infinity();  // M
  double epsilon_c = 0.5;
  int k_sub = 4;
  int grid_g = 0;  // 0 selects max(128, 8n) rounded up to a power of two
  std::uint64_t seed = 1;
  Expression omega0;
  Expression g;
  int output_divisions = 10;  // snapshots at k / output_divisions
  Deposition deposition = Deposition::nearest;
  Bookkeeping bookkeeping = Bookkeeping::split;
  double tail_tol = 1e-12;
  double tol_boundary = 1e-12;

  double epsilon() const;
  double dt() const { return 1.0 / (2.0 * n * k_sub); }
  int grid_size() const;
  KernelParams kernel_params() const;
  void validate() const;
};

/// Structure-of-arrays particle storage in birth order, then grid order;
/// within an entry the positive particle precedes the negative one.
struct ParticleSet {
  std::vector<double> birth_time;
  std::vector<double> zeta_x, zeta_y;
  std::vector<double> weight;   // >= 0, immutable after construction
  std::vector<int> sign;        // +1 or -1
  std::vector<std::uint64_t> stream;  // RNG stream id, 2 * entry + (sign < 0)
  std::vector<double> x, y;
  std::vector<double> reflection_total;

  std::size_t size() const { return weight.size(); }
};

struct SimState {
  double time = 0.0;
  std::uint64_t step_index = 0;
  ParticleSet particles;
  std::size_t active = 0;  // particles [0, active) have birth_time <= time
};

/// Particles for every entry and sign with non-zero weight, all inactive and
/// parked at their birth points.
SimState make_initial_state(const GenerationGrid& grid);

/// Indices with t_i <= t, in particle order.
std::vector<std::size_t> active_set(const SimState& state, double t);

/// Activates every particle born at or before t.
void activate_births(SimState& state, double t);

/// Reflected Euler-Maruyama step for the active particles:
/// candidate = x + drift dt + sqrt(2 nu dt) xi, folded back into the domain.
/// Noise xi comes from the stream (seed, particle stream, step index).
void step(SimState& state, double dt, std::span<const double> drift_x,
          std::span<const double> drift_y, double nu, std::uint64_t seed, const Domain& domain);

/// Smoothed signed field of the active particles, P_eps S+ - P_eps S-.
ScalarField smoothed_field(const SimState& state, const SimConfig& config);

struct OutputRecord {
  double time = 0.0;
  std::size_t active_count = 0;
  double active_mass_pos = 0.0;
  double active_mass_neg = 0.0;
  double ledger_mass_pos = 0.0;
  double ledger_mass_neg = 0.0;
  double field_mass = 0.0;

  double ledger_gap() const;
};

struct RunResult {
  bool ok = true;
  std::string error;
  double epsilon = 0.0;
  int grid_g = 0;
  std::vector<double> times;
  std::vector<ScalarField> snapshots;
  std::vector<OutputRecord> outputs;
  std::vector<double> step_max_speed;  // pre-cutoff drift speed per step
  double max_speed = 0.0;
  SimState final_state;

  double max_ledger_gap() const;
};

/// Integrates from t = 0 to 1 with births activated at step boundaries
/// before each step. Errors abort the run and are reported in the result.
RunResult run(const SimConfig& config);

}  // namespace vlab
