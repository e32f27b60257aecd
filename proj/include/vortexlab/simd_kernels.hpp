#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant selected at runtime. Every variant must produce results that
// are bit-identical to the scalar reference: only add, mul, sub, div, sqrt,
// abs and compare/blend are used, and contraction to FMA is disabled.
namespace vlab::simd {

enum class Isa { scalar, avx2 };

/// Reflected Euler-Maruyama update on the unit square for a batch of
/// particles: candidate = p + drift*dt + sigma*noise, folded per coordinate.
struct AdvanceBatch {
  std::span<double> x;
  std::span<double> y;
  std::span<double> reflection_total;
  std::span<const double> drift_x;
  std::span<const double> drift_y;
  std::span<const double> noise_x;
  std::span<const double> noise_y;
  double dt = 0.0;
  double sigma = 0.0;
};

struct KernelTable {
  Isa isa;
  const char* name;
  /// out[i] = a[i] * b[i]
  void (*multiply)(std::span<const double> a, std::span<const double> b, std::span<double> out);
  /// Returns the first index whose candidate left the single-fold envelope
  /// [-1, 2]^2, or x.size() when every candidate was valid.
  std::size_t (*advance_square)(const AdvanceBatch& batch);
  /// Radial cutoff v -> v min(|v|, M)/|v| in place.
  void (*cutoff)(std::span<double> vx, std::span<double> vy, double speed_bound);
  /// max_i |(vx_i, vy_i)|
  double (*max_norm)(std::span<const double> vx, std::span<const double> vy);
};

const KernelTable& scalar_table();
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();
/// The table chosen at first use: AVX2 when available unless the
/// environment variable VORTEXLAB_ISA=scalar is set.
const KernelTable& active();

}  // namespace vlab::simd
