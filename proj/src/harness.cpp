#include "vortexlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "vortexlab/particle_system.hpp"

namespace vlab {

namespace fs = std::filesystem;

// ---- PDE cache --------------------------------------------------------------------

std::string format_pde_cache(const PdeSolution& sol) {
  std::string out = "# pde modes=" + std::to_string(sol.modes) +
                    " outputs=" + std::to_string(sol.times.size()) +
                    " velocity_bound=" + format_double(sol.velocity_bound) + "\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    out += format_double(sol.times[k]);
    for (double c : sol.coefficients[k]) {
      out += ' ';
      out += format_double(c);
    }
    out += '\n';
  }
  return out;
}

PdeSolution parse_pde_cache(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# pde ", 0) != 0) {
    throw FormatError("pde cache: missing header");
  }
  PdeSolution sol;
  std::size_t outputs = 0;
  std::istringstream hs(line.substr(6));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("pde cache: bad header token " + tok);
    const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "modes") sol.modes = std::stoi(value);
    else if (key == "outputs") outputs = std::stoul(value);
    else if (key == "velocity_bound") sol.velocity_bound = parse_double(value);
  }
  const std::size_t count = static_cast<std::size_t>(sol.modes + 1) * (sol.modes + 1);
  for (std::size_t k = 0; k < outputs; ++k) {
    if (!std::getline(in, line)) throw FormatError("pde cache: truncated");
    std::istringstream row(line);
    if (!(row >> tok)) throw FormatError("pde cache: empty row");
    sol.times.push_back(parse_double(tok));
    std::vector<double> c;
    c.reserve(count);
    while (row >> tok) c.push_back(parse_double(tok));
    if (c.size() != count) throw FormatError("pde cache: wrong coefficient count");
    sol.coefficients.push_back(std::move(c));
  }
  return sol;
}

PdeReference ensure_pde_reference(const HarnessConfig& cfg, const fs::path& out_dir) {
  PdeReference ref;
  ref.dir = out_dir / ("pde_" + cfg.pde_fingerprint());
  const fs::path cache = ref.dir / "coefficients.txt";
  if (fs::exists(cache)) {
    ref.solution = parse_pde_cache(read_file(cache));
    ref.from_cache = true;
    return ref;
  }
  if (cfg.sim.domain.kind() != DomainKind::unit_square) {
    throw UnsupportedDomain("the spectral reference solver needs the unit square");
  }
  ref.solution = solve(cfg.pde);
  fs::create_directories(ref.dir);
  const NodeGrid grid(cfg.pde_grid);
  const auto snaps = ref.solution.snapshots(grid);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    SnapshotHeader h;
    h.kind = "pde";
    h.time = ref.solution.times[k];
    h.grid = grid.size();
    h.nu = cfg.pde.nu;
    h.speed_bound = cfg.pde.speed_bound;
    h.seed = cfg.sim.seed;
    write_snapshot(ref.dir / snapshot_name(static_cast<int>(k)), h, snaps[k]);
  }
  std::string energy = "time,l2_sq,dissipation\n";
  for (const auto& e : ref.solution.energy) {
    energy += format_double(e.time) + "," + format_double(e.l2_sq) + "," +
              format_double(e.dissipation) + "\n";
  }
  write_file(ref.dir / "energy.csv", energy);
  // written last: its presence marks a complete cache entry
  write_file(cache, format_pde_cache(ref.solution));
  return ref;
}

double effective_speed_bound(const HarnessConfig& cfg, const PdeReference* ref) {
  if (!cfg.auto_speed_bound) return cfg.sim.speed_bound;
  if (ref == nullptr) throw std::logic_error("M = auto needs the reference solution");
  return 2.0 * ref->solution.velocity_bound;
}

// ---- sweep --------------------------------------------------------------------------

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return v.empty() ? std::nan("") : 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

CsvTable results_table(const HarnessConfig& cfg, const std::vector<SeedOutcome>& outcomes) {
  const int times = cfg.sim.output_divisions + 1;
  CsvTable t;
  t.header = {"n", "seed", "norm_kind", "sup_over_time_error"};
  for (int k = 0; k < times; ++k) t.header.push_back("e_t" + std::to_string(k));
  t.header.insert(t.header.end(), {"mass_check", "max_u", "status"});

  for (const auto& o : outcomes) {
    for (std::size_t q = 0; q < cfg.norms.size(); ++q) {
      std::vector<std::string> row{std::to_string(o.n), std::to_string(o.seed),
                                   cfg.norms[q].label()};
      if (o.ok) {
        row.push_back(format_double(o.errors[q].sup_over_time));
        for (double e : o.errors[q].per_time) row.push_back(format_double(e));
        row.push_back(format_double(o.mass_check));
        row.push_back(format_double(o.max_u));
        row.push_back("ok");
      } else {
        for (int k = 0; k < times + 1; ++k) row.push_back("nan");
        row.push_back("nan");
        row.push_back("nan");
        row.push_back("failed: " + one_line(o.error));
      }
      t.rows.push_back(std::move(row));
    }
  }

  for (int n : cfg.n_list) {
    for (std::size_t q = 0; q < cfg.norms.size(); ++q) {
      std::vector<std::vector<double>> cols(times + 1);
      double mass = 0.0, max_u = 0.0;
      std::size_t ok = 0, total = 0;
      for (const auto& o : outcomes) {
        if (o.n != n) continue;
        ++total;
        if (!o.ok) continue;
        ++ok;
        cols[0].push_back(o.errors[q].sup_over_time);
        for (int k = 0; k < times; ++k) cols[k + 1].push_back(o.errors[q].per_time[k]);
        mass = std::max(mass, o.mass_check);
        max_u = std::max(max_u, o.max_u);
      }
      const std::string status = "summary " + std::to_string(ok) + "/" + std::to_string(total);
      for (const char* stat : {"mean", "std"}) {
        std::vector<std::string> row{std::to_string(n), stat, cfg.norms[q].label()};
        for (const auto& c : cols) {
          row.push_back(format_double(std::string(stat) == "mean" ? mean_of(c) : std_of(c)));
        }
        row.push_back(format_double(ok ? mass : std::nan("")));
        row.push_back(format_double(ok ? max_u : std::nan("")));
        row.push_back(status);
        t.rows.push_back(std::move(row));
      }
    }
  }
  return t;
}

SweepResult run_sweep(const HarnessConfig& cfg, const PdeSolution& reference, double speed_bound,
                      int threads) {
  SweepResult result;
  result.speed_bound = speed_bound;

  // reference fields on every grid the sweep needs, built before the workers start
  std::map<int, std::vector<ScalarField>> ref_fields;
  struct Task {
    SimConfig sim;
  };
  std::vector<Task> tasks;
  for (int n : cfg.n_list) {
    for (std::uint64_t seed : cfg.seeds()) {
      SimConfig sc = cfg.sim;
      sc.n = n;
      sc.seed = seed;
      sc.speed_bound = speed_bound;
      const int g = sc.grid_size();
      if (!ref_fields.count(g)) ref_fields[g] = reference.snapshots(NodeGrid(g));
      tasks.push_back({sc});
    }
  }

  result.outcomes.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const SimConfig& sc = tasks[i].sim;
      SeedOutcome& o = result.outcomes[i];
      o.n = sc.n;
      o.seed = sc.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        if (std::find(cfg.fail_seeds.begin(), cfg.fail_seeds.end(), sc.seed) !=
            cfg.fail_seeds.end()) {
          throw std::runtime_error("injected failure for seed " + std::to_string(sc.seed));
        }
        const RunResult run_result = run(sc);
        if (!run_result.ok) throw std::runtime_error(run_result.error);
        const auto& refs = ref_fields.at(sc.grid_size());
        for (const auto& spec : cfg.norms) {
          o.errors.push_back(trajectory_error(run_result.snapshots, refs, spec));
        }
        o.mass_check = run_result.max_ledger_gap();
        o.max_u = run_result.max_speed;
        o.ok = true;
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
        o.errors.clear();
      }
      o.wallclock =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  result.results = results_table(cfg, result.outcomes);
  result.timings.header = {"n", "seed", "wallclock_s"};
  for (const auto& o : result.outcomes) {
    result.timings.rows.push_back(
        {std::to_string(o.n), std::to_string(o.seed), format_double(o.wallclock)});
  }
  return result;
}

// ---- subcommands --------------------------------------------------------------------

int cmd_pde(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const ConfigText text = ConfigText::load(opts.config_path);
  const HarnessConfig cfg = resolve_config(text, opts.seed);
  const PdeReference ref = ensure_pde_reference(cfg, opts.out_dir);
  write_file(ref.dir / "config.echo", text.raw);
  const double vb = ref.solution.velocity_bound;
  write_file(ref.dir / "summary.txt", "velocity_bound=" + format_double(vb) +
                                          "\nrecommended_M=" + format_double(2.0 * vb) + "\n");
  out << "reference: " << ref.dir.string() << (ref.from_cache ? " (cached)" : "") << "\n";
  out << "velocity_bound = " << format_double(vb) << "\n";
  out << "recommended M = " << format_double(2.0 * vb) << "\n";
  return 0;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const HarnessConfig cfg = resolve_config(ConfigText::load(opts.config_path), opts.seed);
  std::optional<PdeReference> ref;
  if (cfg.auto_speed_bound) ref = ensure_pde_reference(cfg, opts.out_dir);
  SimConfig sc = cfg.sim;
  sc.speed_bound = effective_speed_bound(cfg, ref ? &*ref : nullptr);

  const fs::path dir = opts.out_dir / cfg.fingerprint();
  fs::create_directories(dir);
  const RunResult r = run(sc);
  if (!r.ok) {
    write_file(dir / "error.txt", r.error + "\n");
    err << "simulate failed: " << r.error << "\n";
    return 1;
  }
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    SnapshotHeader h;
    h.time = r.times[k];
    h.n = sc.n;
    h.grid = r.grid_g;
    h.epsilon = r.epsilon;
    h.nu = sc.nu;
    h.speed_bound = sc.speed_bound;
    h.seed = sc.seed;
    write_snapshot(dir / snapshot_name(static_cast<int>(k)), h, r.snapshots[k]);
  }
  std::string rec =
      "time,active_count,active_mass_pos,active_mass_neg,ledger_mass_pos,ledger_mass_neg,"
      "ledger_gap,field_mass\n";
  for (const auto& o : r.outputs) {
    rec += format_double(o.time) + "," + std::to_string(o.active_count) + "," +
           format_double(o.active_mass_pos) + "," + format_double(o.active_mass_neg) + "," +
           format_double(o.ledger_mass_pos) + "," + format_double(o.ledger_mass_neg) + "," +
           format_double(o.ledger_gap()) + "," + format_double(o.field_mass) + "\n";
  }
  write_file(dir / "record.csv", rec);
  if (cfg.dump_particles) write_file(dir / "particles.txt", format_particles(r.final_state));
  out << "run: " << dir.string() << "\n";
  out << "seed = " << sc.seed << ", n = " << sc.n << ", G = " << r.grid_g
      << ", eps = " << format_double(r.epsilon) << ", M = " << format_double(sc.speed_bound)
      << "\n";
  out << "max |u| = " << format_double(r.max_speed)
      << ", max ledger gap = " << format_double(r.max_ledger_gap()) << "\n";
  return 0;
}

int cmd_converge(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const HarnessConfig cfg = resolve_config(ConfigText::load(opts.config_path), opts.seed);
  const PdeReference ref = ensure_pde_reference(cfg, opts.out_dir);
  const double m = effective_speed_bound(cfg, &ref);
  const SweepResult sweep = run_sweep(cfg, ref.solution, m, opts.threads);
  write_file(opts.out_dir / "results.csv", format_csv(sweep.results));
  write_file(opts.out_dir / "timings.csv", format_csv(sweep.timings));

  out << "reference: " << ref.dir.string() << (ref.from_cache ? " (cached)" : "") << "\n";
  out << "M = " << format_double(m) << "\n";
  bool failures = false;
  for (const auto& o : sweep.outcomes) {
    if (!o.ok) {
      failures = true;
      err << "n=" << o.n << " seed=" << o.seed << " failed: " << o.error << "\n";
    }
  }
  for (const auto& row : sweep.results.rows) {
    if (row[1] != "mean") continue;
    out << "n=" << row[0] << " " << row[2] << " mean sup-time error = " << row[3] << "\n";
  }
  out << "results: " << (opts.out_dir / "results.csv").string() << "\n";
  return failures ? 1 : 0;
}

}  // namespace vlab
