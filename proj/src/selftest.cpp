#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vortexlab/biot_savart.hpp"
#include "vortexlab/geometry.hpp"
#include "vortexlab/harness.hpp"
#include "vortexlab/neumann_heat.hpp"
#include "vortexlab/simd_kernels.hpp"
#include "vortexlab/transforms.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;
using spectral::Basis;

struct OffsetGuard {
  ~OffsetGuard() { testing::set_semigroup_time_offset(0.0); }
};

PropertyResult below(const std::string& name, double measured, double tol) {
  return {name, measured < tol, measured, tol};
}

PropertyResult at_most(const std::string& name, double measured, double tol) {
  return {name, measured <= tol, measured, tol};
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// |grad f| at the nodes from the cosine spectrum of f.
std::vector<double> spectral_gradient_norm(ScalarField f) {
  const int g = f.grid.size();
  const auto& c = f.ensure_spectrum();
  std::vector<double> cx(c.size(), 0.0), cy(c.size(), 0.0);
  for (int k = 0; k < g; ++k) {
    for (int j = 0; j < g; ++j) {
      const auto i = static_cast<std::size_t>(k) * g + j;
      if (j > 0 && j < g - 1) cx[i] = -j * kPi * c[i];
      if (k > 0 && k < g - 1) cy[i] = -k * kPi * c[i];
    }
  }
  std::vector<double> dx(c.size()), dy(c.size());
  spectral::synthesize(cx, dx, g, Basis::sine, Basis::cosine);
  spectral::synthesize(cy, dy, g, Basis::cosine, Basis::sine);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(dx[i], dy[i]);
  return out;
}

}  // namespace

std::vector<PropertyResult> run_selftest(const std::string& fault) {
  if (!fault.empty() && fault != "multiplier") {
    throw std::invalid_argument("unknown fault '" + fault + "' (expected: multiplier)");
  }
  OffsetGuard guard;
  if (fault == "multiplier") testing::set_semigroup_time_offset(1e-3);

  std::vector<PropertyResult> out;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KernelParams kp;
  kp.nu = 1.0;
  const Domain square = Domain::unit_square();
  const NodeGrid g256(256);

  {  // integral of p_t(., y) over the square
    const Vec2 y{0.3, 0.7};
    double worst = 0.0;
    for (double t : {1e-3, 1e-2, 1e-1}) {
      double s = 0.0;
      for (int b = 0; b < 256; ++b) {
        for (int a = 0; a < 256; ++a) {
          s += g256.cell(a, b) * heat_kernel(t, {g256.coord(a), g256.coord(b)}, y, kp);
        }
      }
      worst = std::max(worst, std::abs(s - 1.0));
    }
    out.push_back(below("kernel_mass", worst, 1e-8));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = std::pow(10.0, -4.0 + 4.0 * unit(rng));
      const Vec2 x{unit(rng), unit(rng)}, y{unit(rng), unit(rng)};
      const double a = heat_kernel(t, x, y, kp), b = heat_kernel(t, y, x, kp);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    out.push_back(below("kernel_symmetry", worst, 1e-12));
  }
  {
    const double t = 0.01, x = 0.5;
    double oracle = 1.0;
    for (int k = 1; k <= 200; ++k) {
      oracle += 2.0 * std::cos(k * kPi * x) * std::cos(k * kPi * x) * std::exp(-kp.nu * k * k * kPi * kPi * t);
    }
    out.push_back(below("kernel_series_oracle", std::abs(heat_kernel_1d(t, x, x, kp) - oracle), 1e-10));
  }
  {
    double worst = 0.0;
    const double ts = kp.switch_time();
    for (int i = 0; i < 100; ++i) {
      const double t = ts * std::pow(2.0, -1.0 + 2.0 * unit(rng));
      const double x = unit(rng), y = unit(rng);
      worst = std::max(worst, std::abs(heat_kernel_1d_images(t, x, y, kp) -
                                       heat_kernel_1d_series(t, x, y, kp)));
    }
    out.push_back(below("kernel_images_vs_series", worst, 1e-10));
  }
  {  // sum over the quadrature grid of p_s(x, z) p_t(z, y)
    const double s = 0.005, t = 0.005;
    const Vec2 x{0.3, 0.6}, y{0.55, 0.45};
    double q = 0.0;
    for (int b = 0; b < 256; ++b) {
      for (int a = 0; a < 256; ++a) {
        const Vec2 z{g256.coord(a), g256.coord(b)};
        q += g256.cell(a, b) * heat_kernel(s, x, z, kp) * heat_kernel(t, z, y, kp);
      }
    }
    const double exact = heat_kernel(s + t, x, y, kp);
    out.push_back(below("chapman_kolmogorov_quadrature", std::abs(q - exact) / exact, 1e-6));
  }
  {  // P_s p_t(., y) = p_{s+t}(., y) through the grid semigroup
    const double s = 0.005, t = 0.005;
    const Vec2 y{0.55, 0.45};
    const auto f = ScalarField::sample(g256, [&](double a, double b) { return heat_kernel(t, {a, b}, y, kp); });
    const auto exact = ScalarField::sample(g256, [&](double a, double b) { return heat_kernel(s + t, {a, b}, y, kp); });
    const auto ps = apply_semigroup(f, s, kp);
    double peak = 0.0;
    for (double v : exact.values) peak = std::max(peak, std::abs(v));
    out.push_back(below("chapman_kolmogorov_semigroup", sup_diff(ps, exact) / peak, 1e-6));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double t = std::pow(10.0, -2.5 + 2.0 * unit(rng));
      const Vec2 x{unit(rng), unit(rng)};
      const Vec2 y{0.05 + 0.9 * unit(rng), 0.05 + 0.9 * unit(rng)};
      const Vec2 gy = grad_y_heat_kernel(t, x, y, kp);
      const double step = 1e-6;
      const double fx = (heat_kernel(t, x, {y.x + step, y.y}, kp) - heat_kernel(t, x, {y.x - step, y.y}, kp)) / (2 * step);
      const double fy = (heat_kernel(t, x, {y.x, y.y + step}, kp) - heat_kernel(t, x, {y.x, y.y - step}, kp)) / (2 * step);
      const double scale = std::max({std::abs(fx), std::abs(fy), 1e-3 * heat_kernel(t, x, y, kp), 1e-8});
      worst = std::max(worst, std::max(std::abs(gy.x - fx), std::abs(gy.y - fy)) / scale);
    }
    out.push_back(below("kernel_gradient_fd", worst, 1e-5));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double t = std::pow(10.0, -3.0 + 2.0 * unit(rng));
      const Vec2 x{unit(rng), unit(rng)};
      const double s = unit(rng);
      const auto bp = square.boundary_map(s);
      const Vec2 gy = grad_y_heat_kernel(t, x, bp.position, kp);
      if (square.near_corner(s, 1e-9)) continue;
      worst = std::max(worst, std::abs(dot(bp.normal, gy)));
    }
    out.push_back(below("kernel_neumann_trace", worst, 1e-8));
  }
  {
    double worst = 0.0;
    for (int ti = 0; ti <= 12; ++ti) {
      const double t = std::pow(10.0, -4.0 + ti * 4.0 / 12.0);
      for (int i = 0; i < 40; ++i) {
        const Vec2 x{unit(rng), unit(rng)}, y{unit(rng), unit(rng)};
        const double d2 = dot(x - y, x - y);
        const double bound = 4.0 / t * std::exp(-d2 / (16.0 * kp.nu * t));
        worst = std::max(worst, heat_kernel(t, x, y, kp) / bound);
      }
    }
    out.push_back(at_most("kernel_gaussian_envelope", worst, 1.0));
  }
  {  // t * sup_y p_t(y, y), the diagonal peaks at the corners
    double worst = 0.0;
    for (int i = 0; i <= 12; ++i) {
      const double t = std::pow(10.0, -4.0 + 3.0 * i / 12.0);
      worst = std::max(worst, t * heat_kernel(t, {0.0, 0.0}, {0.0, 0.0}, kp));
    }
    out.push_back(at_most("kernel_ultracontractivity", worst, 1.0 / kp.nu));
  }
  const NodeGrid g128(128);
  const auto smooth = ScalarField::sample(g128, [](double x, double y) {
    return 1.0 + std::cos(kPi * x) * std::cos(2 * kPi * y) + 0.5 * std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.6) * (y - 0.6)) / 0.02);
  });
  {
    const auto a = apply_semigroup(apply_semigroup(smooth, 0.01, kp), 0.02, kp);
    const auto b = apply_semigroup(smooth, 0.03, kp);
    out.push_back(below("semigroup_property", sup_diff(a, b), 1e-10));
  }
  {
    double worst = 0.0;
    for (double t : {0.0, 1e-3, 0.1, 1.0}) {
      worst = std::max(worst, std::abs(apply_semigroup(smooth, t, kp).mass() - smooth.mass()));
    }
    out.push_back(below("semigroup_mass", worst, 1e-10));
  }
  {
    const auto f = ScalarField::sample(g128, [](double x, double) { return std::cos(kPi * x); });
    const auto pf = apply_semigroup(f, 0.1, kp);
    const double decay = std::exp(-kPi * kPi * 0.1);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      worst = std::max(worst, std::abs(pf.values[i] - decay * f.values[i]));
    }
    out.push_back(below("semigroup_eigenfunction", worst, 1e-12));
  }
  {  // |grad P_t f| <= P_t |grad f|
    double worst = -1.0;
    const NodeGrid g(256);
    struct Case {
      double (*f)(double, double);
      double (*gx)(double, double);
      double (*gy)(double, double);
    };
    const Case cases[] = {
        {[](double x, double y) { return std::cos(kPi * x) * std::cos(2 * kPi * y); },
         [](double x, double y) { return -kPi * std::sin(kPi * x) * std::cos(2 * kPi * y); },
         [](double x, double y) { return -2 * kPi * std::cos(kPi * x) * std::sin(2 * kPi * y); }},
        {[](double x, double y) { return std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.0128); },
         [](double x, double y) { return -(x - 0.5) / 0.0064 * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.0128); },
         [](double x, double y) { return -(y - 0.5) / 0.0064 * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.0128); }},
    };
    for (const auto& c : cases) {
      const auto f = ScalarField::sample(g, c.f);
      const auto grad_abs = ScalarField::sample(g, [&](double x, double y) { return std::hypot(c.gx(x, y), c.gy(x, y)); });
      for (double t : {1e-3, 1e-2}) {
        const auto lhs = spectral_gradient_norm(apply_semigroup(f, t, kp));
        const auto rhs = apply_semigroup(grad_abs, t, kp);
        for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, lhs[i] - rhs.values[i]);
      }
    }
    out.push_back(at_most("gradient_estimate", worst, 1e-8));
  }
  {
    const NodeGrid g(256);
    const auto w = ScalarField::sample(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    const auto u = velocity(w);
    double err = 0.0;
    for (int b = 0; b < 256; ++b) {
      for (int a = 0; a < 256; ++a) {
        const double x = g.coord(a), y = g.coord(b);
        const Vec2 v = u.at(a, b);
        err = std::max({err, std::abs(v.x - std::sin(kPi * x) * std::cos(kPi * y) / (2 * kPi)),
                        std::abs(v.y + std::cos(kPi * x) * std::sin(kPi * y) / (2 * kPi))});
      }
    }
    out.push_back(below("biot_savart_eigenfunction", err, 1e-8));
    double div = 0.0;
    for (double v : divergence(u).values) div = std::max(div, std::abs(v));
    out.push_back(below("velocity_divergence", div, 1e-8));
    double trace = 0.0;
    for (int i = 0; i < 256; ++i) {
      trace = std::max({trace, std::abs(u.at(0, i).x), std::abs(u.at(255, i).x),
                        std::abs(u.at(i, 0).y), std::abs(u.at(i, 255).y)});
    }
    out.push_back(below("velocity_normal_trace", trace, 1e-8));
  }
  {
    double lip = 0.0;
    bool bounded = true;
    for (int i = 0; i < 10000; ++i) {
      const double m = 5.0 * unit(rng);
      const Vec2 a{8 * unit(rng) - 4, 8 * unit(rng) - 4}, b{8 * unit(rng) - 4, 8 * unit(rng) - 4};
      const Vec2 fa = cutoff(a, m), fb = cutoff(b, m);
      if (norm(fa) > m * (1 + 1e-15)) bounded = false;
      if (norm(a) <= m && (fa.x != a.x || fa.y != a.y)) bounded = false;
      const double d = norm(a - b);
      if (d > 1e-9) lip = std::max(lip, norm(fa - fb) / d);
    }
    out.push_back(at_most("cutoff_lipschitz", bounded ? lip : 1e9, 2.0));
  }
  {
    double idem = 0.0, envelope = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const Vec2 c{3 * unit(rng) - 1, 3 * unit(rng) - 1};
      const Reflection r = square.reflect(c);
      idem = std::max(idem, norm(square.reflect(r.position).displacement));
      const double dx = std::max({0.0, -c.x, c.x - 1}), dy = std::max({0.0, -c.y, c.y - 1});
      envelope = std::max(envelope, norm(r.position - c) - 2 * std::hypot(dx, dy));
    }
    out.push_back(at_most("reflection_idempotent", idem, 0.0));
    out.push_back(at_most("reflection_displacement_bound", envelope, 1e-12));
  }
  {
    const simd::KernelTable& ref = simd::scalar_table();
    const simd::KernelTable& act = simd::active();
    const std::size_t n = 1027;
    std::vector<double> x0(n), y0(n), dx(n), dy(n), nx(n), ny(n);
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < n; ++i) {
      x0[i] = unit(rng);
      y0[i] = unit(rng);
      dx[i] = 3 * gauss(rng);
      dy[i] = 3 * gauss(rng);
      nx[i] = gauss(rng);
      ny[i] = gauss(rng);
    }
    std::size_t mismatches = 0;
    auto advance = [&](const simd::KernelTable& t, std::vector<double>& x, std::vector<double>& y,
                       std::vector<double>& k) {
      x = x0;
      y = y0;
      k.assign(n, 0.0);
      return t.advance_square({x, y, k, dx, dy, nx, ny, 0.01, 0.1});
    };
    std::vector<double> xa, ya, ka, xb, yb, kb;
    if (advance(ref, xa, ya, ka) != advance(act, xb, yb, kb)) ++mismatches;
    for (std::size_t i = 0; i < n; ++i) {
      mismatches += std::bit_cast<std::uint64_t>(xa[i]) != std::bit_cast<std::uint64_t>(xb[i]);
      mismatches += std::bit_cast<std::uint64_t>(ya[i]) != std::bit_cast<std::uint64_t>(yb[i]);
      mismatches += std::bit_cast<std::uint64_t>(ka[i]) != std::bit_cast<std::uint64_t>(kb[i]);
    }
    std::vector<double> ux = dx, uy = dy, vx = dx, vy = dy;
    ref.cutoff(ux, uy, 2.0);
    act.cutoff(vx, vy, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      mismatches += std::bit_cast<std::uint64_t>(ux[i]) != std::bit_cast<std::uint64_t>(vx[i]);
      mismatches += std::bit_cast<std::uint64_t>(uy[i]) != std::bit_cast<std::uint64_t>(vy[i]);
    }
    mismatches += ref.max_norm(dx, dy) != act.max_norm(dx, dy);
    out.push_back(at_most(std::string("simd_equivalence_") + act.name, static_cast<double>(mismatches), 0.0));
  }
  return out;
}

int cmd_selftest(const std::string& fault, std::ostream& out) {
  const auto results = run_selftest(fault);
  int failed = 0;
  for (const auto& r : results) {
    char line[200];
    std::snprintf(line, sizeof line, "%s %-34s measured=%.3e tol=%.1e", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.measured, r.tolerance);
    out << line << "\n";
    failed += !r.pass;
  }
  out << results.size() << " properties, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace vlab
