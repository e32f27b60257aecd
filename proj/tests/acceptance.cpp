// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "vortexlab/biot_savart.hpp"
#include "vortexlab/config.hpp"
#include "vortexlab/empirical_measure.hpp"
#include "vortexlab/harness.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/neumann_heat.hpp"
#include "vortexlab/particle_system.hpp"
#include "vortexlab/pde_reference.hpp"
#include "vortexlab/transforms.hpp"

namespace fs = std::filesystem;
using namespace vlab;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kLinearConfig = R"([model]
nu = 0.2
M = 0
omega0 = 0
g = 1

[sweep]
n_list = 8,16,32
seeds = 10
norms = l2, sup
)";

const char* kNonlinearConfig = R"([model]
nu = 0.1
M = auto
omega0 = 10*gauss(0.4, 0.5, 0.08) - 5*gauss(0.65, 0.5, 0.08)
g = 0.5*(1 + cos(2*pi*s))

[heat]
epsilon_c = 0.5

[sweep]
n_list = 8,16,32
seeds = 10
norms = l2, sup
)";

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.1fs", secs);
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | "
            << v.detail << " | " << time_buf << std::endl;
  failures += !v.pass;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// mean sup-time error per n for one norm label, from a results table
std::map<int, double> cohort_means(const CsvTable& t, const std::string& norm) {
  std::map<int, double> out;
  for (const auto& row : t.rows) {
    if (row[1] == "mean" && row[2] == norm) out[std::stoi(row[0])] = parse_double(row[3]);
  }
  return out;
}

double l2_on(const ScalarField& f) { return norm(f, NormSpec::lp_norm(2.0)); }

double relative_change(const PdeSolution& a, const PdeSolution& b, NodeGrid grid) {
  const auto fa = a.snapshots(grid), fb = b.snapshots(grid);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k) {
    err = std::max(err, l2_on(fa[k] - fb[k]));
    ref = std::max(ref, l2_on(fb[k]));
  }
  return err / ref;
}

}  // namespace

int main() {
  const fs::path root = fs::current_path() / "acceptance_out";
  fs::remove_all(root);
  fs::create_directories(root);
  write_file(root / "linear.ini", kLinearConfig);
  write_file(root / "nonlinear.ini", kNonlinearConfig);

  report(1, "Neumann kernel identities", [] {
    const auto t0 = std::chrono::steady_clock::now();
    KernelParams kp;
    kp.nu = 1.0;
    const NodeGrid g(256);
    double mass = 0.0;
    const Vec2 y{0.3, 0.7};
    for (double t : {1e-3, 1e-2, 1e-1}) {
      double s = 0.0;
      for (int b = 0; b < 256; ++b)
        for (int a = 0; a < 256; ++a) s += g.cell(a, b) * heat_kernel(t, {g.coord(a), g.coord(b)}, y, kp);
      mass = std::max(mass, std::abs(s - 1.0));
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sym = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = std::pow(10.0, -3.0 + 2.0 * u(rng));
      const Vec2 x{u(rng), u(rng)}, z{u(rng), u(rng)};
      const double a = heat_kernel(t, x, z, kp), b = heat_kernel(t, z, x, kp);
      sym = std::max(sym, std::abs(a - b) / std::max(1.0, a));
    }
    const double s = 0.005, t = 0.005;
    const Vec2 x{0.3, 0.6}, z{0.55, 0.45};
    double q = 0.0;
    for (int b = 0; b < 256; ++b)
      for (int a = 0; a < 256; ++a) {
        const Vec2 w{g.coord(a), g.coord(b)};
        q += g.cell(a, b) * heat_kernel(s, x, w, kp) * heat_kernel(t, w, z, kp);
      }
    const double ck = std::abs(q - heat_kernel(s + t, x, z, kp)) / heat_kernel(s + t, x, z, kp);
    double rep = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double tt = kp.switch_time() * std::pow(2.0, -1.0 + 2.0 * u(rng));
      const double a = u(rng), b = u(rng);
      rep = std::max(rep, std::abs(heat_kernel_1d_images(tt, a, b, kp) - heat_kernel_1d_series(tt, a, b, kp)));
    }
    const double secs = elapsed_since(t0);
    const bool ok = mass < 1e-8 && sym < 1e-12 && ck < 1e-6 && rep < 1e-10 && secs < 10.0;
    return Verdict{ok, "mass " + sci(mass) + ", symmetry " + sci(sym) + ", CK " + sci(ck) +
                           ", images/series " + sci(rep) + ", " + sci(secs) + " s"};
  });

  report(2, "gradient estimate |grad P_t f| <= P_t |grad f|", [] {
    const auto t0 = std::chrono::steady_clock::now();
    KernelParams kp;
    kp.nu = 1.0;
    const NodeGrid g(256);
    using F = std::function<double(double, double)>;
    struct Case {
      F f, gx, gy;
    };
    auto bump = [](double x, double y) {
      return std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.0128);
    };
    const Case cases[] = {
        {[](double x, double y) { return std::cos(kPi * x) * std::cos(2 * kPi * y); },
         [](double x, double y) { return -kPi * std::sin(kPi * x) * std::cos(2 * kPi * y); },
         [](double x, double y) { return -2 * kPi * std::cos(kPi * x) * std::sin(2 * kPi * y); }},
        {bump, [&](double x, double y) { return -(x - 0.5) / 0.0064 * bump(x, y); },
         [&](double x, double y) { return -(y - 0.5) / 0.0064 * bump(x, y); }},
    };
    double worst = -1e300;
    for (const auto& c : cases) {
      const auto f = ScalarField::sample(g, c.f);
      const auto grad_abs =
          ScalarField::sample(g, [&](double x, double y) { return std::hypot(c.gx(x, y), c.gy(x, y)); });
      for (double t : {1e-3, 1e-2}) {
        ScalarField pf = apply_semigroup(f, t, kp);
        const auto& spec = pf.ensure_spectrum();
        std::vector<double> cx(spec.size(), 0.0), cy(spec.size(), 0.0);
        for (int k = 0; k < 256; ++k)
          for (int j = 0; j < 256; ++j) {
            const auto i = static_cast<std::size_t>(k) * 256 + j;
            if (j > 0 && j < 255) cx[i] = -j * kPi * spec[i];
            if (k > 0 && k < 255) cy[i] = -k * kPi * spec[i];
          }
        std::vector<double> dx(spec.size()), dy(spec.size());
        spectral::synthesize(cx, dx, 256, spectral::Basis::sine, spectral::Basis::cosine);
        spectral::synthesize(cy, dy, 256, spectral::Basis::cosine, spectral::Basis::sine);
        const auto rhs = apply_semigroup(grad_abs, t, kp);
        for (std::size_t i = 0; i < dx.size(); ++i) {
          worst = std::max(worst, std::hypot(dx[i], dy[i]) - rhs.values[i]);
        }
      }
    }
    const double secs = elapsed_since(t0);
    return Verdict{worst <= 1e-8 && secs < 5.0,
                   "max(|grad P_t f| - P_t|grad f|) = " + sci(worst) + ", " + sci(secs) + " s"};
  });

  report(3, "Biot-Savart eigenfunction at G=256", [] {
    const NodeGrid g(256);
    const auto w = ScalarField::sample(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    const auto u = velocity(w);
    double err = 0.0;
    for (int b = 0; b < 256; ++b)
      for (int a = 0; a < 256; ++a) {
        const double x = g.coord(a), y = g.coord(b);
        err = std::max({err, std::abs(u.at(a, b).x - std::sin(kPi * x) * std::cos(kPi * y) / (2 * kPi)),
                        std::abs(u.at(a, b).y + std::cos(kPi * x) * std::sin(kPi * y) / (2 * kPi))});
      }
    double div = 0.0;
    for (double v : divergence(u).values) div = std::max(div, std::abs(v));
    double trace = 0.0;
    for (int i = 0; i < 256; ++i) {
      trace = std::max({trace, std::abs(u.at(0, i).x), std::abs(u.at(255, i).x), std::abs(u.at(i, 0).y),
                        std::abs(u.at(i, 255).y)});
    }
    return Verdict{err < 1e-8 && div < 1e-8 && trace < 1e-8,
                   "sup err " + sci(err) + ", max|div u| " + sci(div) + ", max|u.n| " + sci(trace)};
  });

  report(4, "grid-route drift vs pairwise K_n quadrature", [] {
    const auto t0 = std::chrono::steady_clock::now();
    KernelParams kp;
    kp.nu = 1.0;
    const double eps = 0.05;
    const NodeGrid grid(128);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(10), y(10), w(10);
    for (int i = 0; i < 10; ++i) {
      x[i] = 0.05 + 0.9 * u(rng);
      y[i] = 0.05 + 0.9 * u(rng);
      w[i] = (i % 2 ? -1.0 : 1.0) * (0.5 + u(rng));
    }
    const double inf = std::numeric_limits<double>::infinity();
    const DriftResult grid_route = mean_field_drift({x, y, w}, eps, grid, inf, kp, Deposition::bilinear);
    PairKernel pk(grid, eps, kp);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      Vec2 direct{0.0, 0.0};
      for (int j = 0; j < 10; ++j) direct = direct + w[j] * pk({x[i], y[i]}, {x[j], y[j]});
      const double diff = std::hypot(grid_route.ux[i] - direct.x, grid_route.uy[i] - direct.y);
      worst = std::max(worst, diff / norm(direct));
    }
    const DriftResult nearest = mean_field_drift({x, y, w}, eps, grid, inf, kp, Deposition::nearest);
    double worst_nearest = 0.0;
    for (int i = 0; i < 10; ++i) {
      Vec2 direct{0.0, 0.0};
      for (int j = 0; j < 10; ++j) direct = direct + w[j] * pk({x[i], y[i]}, {x[j], y[j]});
      worst_nearest = std::max(worst_nearest,
                               std::hypot(nearest.ux[i] - direct.x, nearest.uy[i] - direct.y) / norm(direct));
    }
    const double secs = elapsed_since(t0);
    return Verdict{worst < 1e-3 && secs < 60.0,
                   "max rel err " + sci(worst) + " (bilinear deposition; nearest gives " +
                       sci(worst_nearest) + "), " + sci(secs) + " s"};
  });

  report(5, "mass ledger exactness", [&] {
    double gap = 0.0;
    std::size_t checked = 0;
    for (const char* text : {kLinearConfig, kNonlinearConfig}) {
      HarnessConfig cfg = resolve_config(ConfigText::parse(text));
      for (Bookkeeping book : {Bookkeeping::split, Bookkeeping::signed_}) {
        for (int n : {8, 16}) {
          SimConfig sc = cfg.sim;
          sc.n = n;
          sc.bookkeeping = book;
          if (cfg.auto_speed_bound) sc.speed_bound = 1.0;
          sc.output_divisions = 20;
          const RunResult r = run(sc);
          if (!r.ok) throw std::runtime_error(r.error);
          gap = std::max(gap, r.max_ledger_gap());
          checked += r.outputs.size();
        }
      }
    }
    return Verdict{gap < 1e-12, "max ledger gap " + sci(gap) + " over " + std::to_string(checked) + " output times"};
  });

  std::string linear_csv, nonlinear_csv;

  report(6, "linear regime convergence (M=0, g=1, nu=0.2)", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream out, err;
    CommandOptions opts{(root / "linear.ini").string(), root / "linear", std::nullopt, 1};
    cmd_converge(opts, out, err);
    linear_csv = read_file(root / "linear" / "results.csv");
    const auto means = cohort_means(parse_csv(linear_csv), "l2");
    const double e8 = means.at(8), e16 = means.at(16), e32 = means.at(32);
    const double secs = elapsed_since(t0);
    const bool ok = e8 > e16 && e16 > e32 && e32 < 0.7 * e8 && secs < 600.0;
    return Verdict{ok, "mean sup-time L2 error n=8 " + sci(e8) + ", n=16 " + sci(e16) + ", n=32 " +
                           sci(e32) + " (ratio 32/8 = " + sci(e32 / e8) + "), " + sci(secs) + " s"};
  });

  report(7, "nonlinear desk-scale trend with M from the PDE bound", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream out, err;
    CommandOptions opts{(root / "nonlinear.ini").string(), root / "nonlinear", std::nullopt, 1};
    cmd_pde(opts, out, err);
    const HarnessConfig cfg = resolve_config(ConfigText::load(opts.config_path));
    const PdeReference ref = ensure_pde_reference(cfg, opts.out_dir);
    const double m = effective_speed_bound(cfg, &ref);
    cmd_converge(opts, out, err);
    nonlinear_csv = read_file(root / "nonlinear" / "results.csv");
    const CsvTable t = parse_csv(nonlinear_csv);
    const auto means = cohort_means(t, "l2");
    double max_u = 0.0;
    bool all_ok = true;
    for (const auto& row : t.rows) {
      if (row[1] == "mean" || row[1] == "std") continue;
      all_ok = all_ok && row.back() == "ok";
      max_u = std::max(max_u, parse_double(row[row.size() - 2]));
    }
    const double e8 = means.at(8), e16 = means.at(16), e32 = means.at(32);
    const double secs = elapsed_since(t0);
    const bool ok = all_ok && e8 > e16 && e16 > e32 && max_u < m && secs < 1800.0;
    return Verdict{ok, "mean sup-time L2 error n=8 " + sci(e8) + ", n=16 " + sci(e16) + ", n=32 " +
                           sci(e32) + "; max|u| " + sci(max_u) + " < M " + sci(m) + ", " + sci(secs) + " s"};
  });

  report(8, "signed splitting equivalence at n=16", [&] {
    const HarnessConfig cfg = resolve_config(ConfigText::parse(kNonlinearConfig));
    const PdeReference ref = ensure_pde_reference(cfg, root / "nonlinear");
    SimConfig sc = cfg.sim;
    sc.n = 16;
    sc.seed = 3;
    sc.speed_bound = effective_speed_bound(cfg, &ref);
    sc.bookkeeping = Bookkeeping::split;
    const RunResult a = run(sc);
    sc.bookkeeping = Bookkeeping::signed_;
    const RunResult b = run(sc);
    if (!a.ok || !b.ok) throw std::runtime_error(a.ok ? b.error : a.error);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
      for (std::size_t i = 0; i < a.snapshots[k].values.size(); ++i) {
        diff = std::max(diff, std::abs(a.snapshots[k].values[i] - b.snapshots[k].values[i]));
      }
    }
    return Verdict{diff < 1e-10, "snapshot sup difference " + sci(diff)};
  });

  report(9, "PDE self-convergence under J and dt refinement", [&] {
    const HarnessConfig cfg = resolve_config(ConfigText::parse(kNonlinearConfig));
    const PdeSolution base = ensure_pde_reference(cfg, root / "nonlinear").solution;
    PdeConfig fine_j = cfg.pde;
    fine_j.modes = 2 * cfg.pde.modes;
    PdeConfig fine_dt = cfg.pde;
    fine_dt.dt = 0.5 * cfg.pde.dt;
    const NodeGrid grid(128);
    const double ej = relative_change(base, solve(fine_j), grid);
    const double et = relative_change(base, solve(fine_dt), grid);
    return Verdict{ej < 1e-4 && et < 1e-4,
                   "rel change J " + std::to_string(cfg.pde.modes) + "->" + std::to_string(fine_j.modes) +
                       ": " + sci(ej) + ", dt halved: " + sci(et)};
  });

  report(10, "byte-identical CSVs under --threads 1 and --threads 8", [&] {
    bool same = true;
    std::string detail;
    for (const auto& [name, first] : {std::pair{std::string("linear"), linear_csv},
                                      std::pair{std::string("nonlinear"), nonlinear_csv}}) {
      if (first.empty()) throw std::runtime_error(name + " sweep did not produce a CSV");
      std::ostringstream out, err;
      CommandOptions opts{(root / (name + ".ini")).string(), root / name, std::nullopt, 8};
      cmd_converge(opts, out, err);
      const std::string again = read_file(root / name / "results.csv");
      const bool eq = again == first;
      same = same && eq;
      detail += name + (eq ? " identical (" : " DIFFERENT (") + std::to_string(first.size()) + " bytes); ";
    }
    return Verdict{same, detail};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
