#pragma once

#include <string>
#include <vector>

#include "vortexlab/field.hpp"
#include "vortexlab/neumann_heat.hpp"

namespace vlab {

struct NormSpec {
  enum class Kind { sup, lp, sobolev };
  Kind kind = Kind::lp;
  double p = 2.0;      // lp only
  double alpha = 0.0;  // sobolev only
  double nu = 1.0;     // sobolev multiplier uses nu pi^2 (j^2 + k^2)

  static NormSpec sup_norm() { return {Kind::sup, 2.0, 0.0, 1.0}; }
  static NormSpec lp_norm(double p) { return {Kind::lp, p, 0.0, 1.0}; }
  static NormSpec sobolev_norm(double alpha, double nu) { return {Kind::sobolev, 2.0, alpha, nu}; }

  /// "sup", "l<p>" (e.g. "l2"), "h<alpha>" (e.g. "h-1", "h0.5").
  static NormSpec parse(const std::string& text, double nu);
  std::string label() const;
};

double norm(const ScalarField& f, const NormSpec& spec);

struct TrajectoryError {
  double sup_over_time = 0.0;
  std::vector<double> per_time;
};

TrajectoryError trajectory_error(const std::vector<ScalarField>& particle,
                                 const std::vector<ScalarField>& reference, const NormSpec& spec);

}  // namespace vlab
