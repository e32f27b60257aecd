#include "vortexlab/empirical_measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vlab {

namespace {

double parse_number(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad norm spec: " + whole);
  return v;
}

double trapezoid_lp(const ScalarField& f, double p) {
  const auto& g = f.grid;
  double s = 0.0;
  for (int b = 0; b < g.size(); ++b) {
    for (int a = 0; a < g.size(); ++a) {
      const double v = std::abs(f.at(a, b));
      s += g.cell(a, b) * (p == 2.0 ? v * v : std::pow(v, p));
    }
  }
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

}  // namespace

NormSpec NormSpec::parse(const std::string& text, double nu) {
  if (text == "sup" || text == "linf") return sup_norm();
  if (text.size() > 1 && (text[0] == 'l' || text[0] == 'L')) {
    const double p = parse_number(text.substr(1), text);
    if (p < 1.0) throw std::invalid_argument("norm: p must be >= 1 in " + text);
    return lp_norm(p);
  }
  if (text.size() > 1 && (text[0] == 'h' || text[0] == 'H')) {
    return sobolev_norm(parse_number(text.substr(1), text), nu);
  }
  throw std::invalid_argument("unknown norm spec: " + text);
}

std::string NormSpec::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::sup: return "sup";
    case Kind::lp: out << 'l' << p; break;
    case Kind::sobolev: out << 'h' << alpha; break;
  }
  return out.str();
}

double norm(const ScalarField& f, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::sup: {
      double m = 0.0;
      for (double v : f.values) m = std::max(m, std::abs(v));
      return m;
    }
    case NormSpec::Kind::lp:
      if (spec.p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
      return trapezoid_lp(f, spec.p);
    case NormSpec::Kind::sobolev: {
      KernelParams params;
      params.nu = spec.nu;
      return trapezoid_lp(fractional_multiplier(f, spec.alpha, params), 2.0);
    }
  }
  return 0.0;
}

TrajectoryError trajectory_error(const std::vector<ScalarField>& particle,
                                 const std::vector<ScalarField>& reference, const NormSpec& spec) {
  if (particle.size() != reference.size()) {
    throw std::invalid_argument("trajectory_error: output time counts differ");
  }
  TrajectoryError out;
  for (std::size_t k = 0; k < particle.size(); ++k) {
    if (!(particle[k].grid == reference[k].grid)) {
      throw std::invalid_argument("trajectory_error: grids differ at output " + std::to_string(k));
    }
    const double e = norm(particle[k] - reference[k], spec);
    out.per_time.push_back(e);
    out.sup_over_time = std::max(out.sup_over_time, e);
  }
  return out;
}

}  // namespace vlab
