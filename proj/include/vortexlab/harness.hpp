#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vortexlab/config.hpp"
#include "vortexlab/empirical_measure.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/pde_reference.hpp"

namespace vlab {

struct CommandOptions {
  std::string config_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;  // scheduling only
};

// ---- selftest ---------------------------------------------------------------

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

/// Kernel, Biot-Savart, reflection and SIMD property checks. fault may be
/// "" or "multiplier" (corrupts the semigroup multiplier for the duration).
std::vector<PropertyResult> run_selftest(const std::string& fault = "");
int cmd_selftest(const std::string& fault, std::ostream& out);

// ---- reference PDE ------------------------------------------------------------

struct PdeReference {
  std::filesystem::path dir;
  PdeSolution solution;
  bool from_cache = false;
};

/// Cache text: header line, then one line per output time holding the time
/// and the (J+1)^2 coefficients of omega.
std::string format_pde_cache(const PdeSolution& sol);
PdeSolution parse_pde_cache(const std::string& text);

/// Solves the reference PDE or loads it from <out>/pde_<fingerprint>/.
PdeReference ensure_pde_reference(const HarnessConfig& cfg, const std::filesystem::path& out_dir);

/// The particle speed bound: the configured M, or 2 * velocity_bound for M = auto.
double effective_speed_bound(const HarnessConfig& cfg, const PdeReference* ref);

// ---- sweep ----------------------------------------------------------------------

struct SeedOutcome {
  int n = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<TrajectoryError> errors;  // one per norm
  double mass_check = 0.0;
  double max_u = 0.0;
  double wallclock = 0.0;
};

struct SweepResult {
  double speed_bound = 0.0;
  std::vector<SeedOutcome> outcomes;  // (n, seed) order
  CsvTable results;
  CsvTable timings;
};

SweepResult run_sweep(const HarnessConfig& cfg, const PdeSolution& reference, double speed_bound,
                      int threads);

/// Rows per (n, seed, norm), then mean and std rows per (n, norm) over the
/// successful seeds.
CsvTable results_table(const HarnessConfig& cfg, const std::vector<SeedOutcome>& outcomes);

// ---- subcommands ------------------------------------------------------------

int cmd_pde(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_converge(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace vlab
