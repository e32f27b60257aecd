#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vlab {

/// G x G node lattice over [0,1]^2 with spacing h = 1/(G-1). Nodes include
/// the boundary, so the natural quadrature is the trapezoidal rule.
class NodeGrid {
 public:
  NodeGrid() = default;
  explicit NodeGrid(int size) : size_(size) {
    if (size < 4) throw std::invalid_argument("grid needs at least 4 nodes per side");
  }

  int size() const { return size_; }
  std::size_t count() const { return static_cast<std::size_t>(size_) * size_; }
  double spacing() const { return 1.0 / (size_ - 1); }
  double coord(int a) const { return a * spacing(); }
  /// 1D trapezoid weight (1/2 at the two end nodes).
  double weight(int a) const { return (a == 0 || a == size_ - 1) ? 0.5 : 1.0; }
  /// 2D quadrature weight of node (a, b), including h^2.
  double cell(int a, int b) const {
    const double h = spacing();
    return weight(a) * weight(b) * h * h;
  }
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(b) * size_ + a;
  }

  friend bool operator==(const NodeGrid&, const NodeGrid&) = default;

 private:
  int size_ = 0;
};

/// Grid-sampled function on the closed square. values are node-major
/// (row b holds y = b h, column a holds x = a h). spectrum, when present,
/// holds coefficients c[k*G + j] of cos(j pi x) cos(k pi y).
struct ScalarField {
  NodeGrid grid;
  std::vector<double> values;
  std::optional<std::vector<double>> spectrum;

  ScalarField() = default;
  explicit ScalarField(NodeGrid g) : grid(g), values(g.count(), 0.0) {}

  template <class F>
  static ScalarField sample(NodeGrid g, F&& f) {
    ScalarField out(g);
    for (int b = 0; b < g.size(); ++b) {
      for (int a = 0; a < g.size(); ++a) {
        out.values[g.index(a, b)] = f(g.coord(a), g.coord(b));
      }
    }
    return out;
  }

  double& at(int a, int b) { return values[grid.index(a, b)]; }
  double at(int a, int b) const { return values[grid.index(a, b)]; }

  /// Trapezoidal integral over the square.
  double mass() const;
  /// Fills spectrum from values.
  void compute_spectrum();
  /// Ensures spectrum is present and returns it.
  const std::vector<double>& ensure_spectrum();
};

ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

}  // namespace vlab
