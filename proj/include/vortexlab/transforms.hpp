#pragma once

#include <span>

namespace vlab::spectral {

/// Per-axis series basis on a G-node axis.
///   cosine: all nodes, modes 0..G-1, f(x) = sum c_k cos(k pi x)
///   sine:   interior nodes, modes 1..G-2, f(x) = sum s_k sin(k pi x)
/// Coefficient arrays are always G x G and indexed [k_y * G + k_x]; sine
/// axes keep entries 0 and G-1 at zero.
enum class Basis { cosine, sine };

/// Node values -> series coefficients. For sine axes, boundary node values
/// are ignored. Exact inverse of synthesize on the retained modes.
void analyze(std::span<const double> values, std::span<double> coeffs, int grid_size,
             Basis bx, Basis by);

/// Series coefficients -> node values. Sine axes produce zeros on boundary
/// nodes.
void synthesize(std::span<const double> coeffs, std::span<double> values, int grid_size,
                Basis bx, Basis by);

/// 1D variants on a single axis, used by quadrature and projection code.
void analyze_1d(std::span<const double> values, std::span<double> coeffs, Basis basis);
void synthesize_1d(std::span<const double> coeffs, std::span<double> values, Basis basis);

}  // namespace vlab::spectral
