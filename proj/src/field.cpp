#include "vortexlab/field.hpp"

#include "vortexlab/transforms.hpp"

namespace vlab {

double ScalarField::mass() const {
  const int g = grid.size();
  double total = 0.0;
  for (int b = 0; b < g; ++b) {
    double row = 0.0;
    for (int a = 0; a < g; ++a) row += grid.weight(a) * values[grid.index(a, b)];
    total += grid.weight(b) * row;
  }
  const double h = grid.spacing();
  return total * h * h;
}

void ScalarField::compute_spectrum() {
  std::vector<double> c(grid.count());
  spectral::analyze(values, c, grid.size(), spectral::Basis::cosine, spectral::Basis::cosine);
  spectrum = std::move(c);
}

const std::vector<double>& ScalarField::ensure_spectrum() {
  if (!spectrum) compute_spectrum();
  return *spectrum;
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("field grids differ");
}

}  // namespace

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = s * a.values[i];
  return out;
}

}  // namespace vlab
