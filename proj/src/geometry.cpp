#include "vortexlab/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace vlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double fold_unit(double c) {
  c = std::fabs(c);
  if (c > 1.0) c = 2.0 - c;
  return c;
}

}  // namespace

Domain Domain::disk(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("disk radius must be positive and finite");
  }
  return Domain(DomainKind::unit_disk, radius);
}

Domain Domain::from_name(const std::string& name, double radius) {
  if (name == "unit_square") return unit_square();
  if (name == "unit_disk") return disk(radius);
  throw std::invalid_argument("unknown domain '" + name + "'");
}

const char* Domain::name() const {
  return kind_ == DomainKind::unit_square ? "unit_square" : "unit_disk";
}

double Domain::perimeter() const {
  return kind_ == DomainKind::unit_square ? 4.0 : kTwoPi * radius_;
}

double Domain::area() const {
  return kind_ == DomainKind::unit_square ? 1.0
                                          : std::numbers::pi * radius_ * radius_;
}

bool Domain::contains(Vec2 p, double tol) const {
  if (kind_ == DomainKind::unit_square) {
    return p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol;
  }
  return norm(p) <= radius_ + tol;
}

double Domain::distance_to_boundary(Vec2 p) const {
  if (kind_ == DomainKind::unit_square) {
    return std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
  }
  return radius_ - norm(p);
}

BoundaryPoint Domain::boundary_map(double s) const {
  if (!(s >= 0.0 && s < 1.0)) {
    throw std::invalid_argument("boundary parameter must lie in [0,1)");
  }
  BoundaryPoint bp;
  bp.s = s;
  if (kind_ == DomainKind::unit_disk) {
    const double a = kTwoPi * s;
    bp.position = {radius_ * std::cos(a), radius_ * std::sin(a)};
    bp.normal = {-std::cos(a), -std::sin(a)};
    bp.arclength_factor = kTwoPi * radius_;
    return bp;
  }
  bp.arclength_factor = 4.0;
  const double u = 4.0 * s;
  const int edge = std::min(3, static_cast<int>(u));
  const double r = u - edge;
  switch (edge) {
    case 0: bp.position = {r, 0.0}; bp.normal = {0.0, 1.0}; break;
    case 1: bp.position = {1.0, r}; bp.normal = {-1.0, 0.0}; break;
    case 2: bp.position = {1.0 - r, 1.0}; bp.normal = {0.0, -1.0}; break;
    default: bp.position = {0.0, 1.0 - r}; bp.normal = {1.0, 0.0}; break;
  }
  if (r == 0.0) bp.normal = inward_normal(bp.position);
  return bp;
}

bool Domain::near_corner(double s, double tol) const {
  if (kind_ != DomainKind::unit_square) return false;
  // one unit of 4s is one unit of arclength
  const double u = 4.0 * s;
  return std::fabs(u - std::round(u)) <= tol;
}

Vec2 Domain::inward_normal(Vec2 p, double tol_boundary) const {
  if (kind_ == DomainKind::unit_disk) {
    const double r = norm(p);
    if (std::fabs(r - radius_) > tol_boundary) {
      throw std::invalid_argument("inward_normal: point is not on the boundary");
    }
    return {-p.x / r, -p.y / r};
  }
  if (std::fabs(distance_to_boundary(p)) > tol_boundary) {
    throw std::invalid_argument("inward_normal: point is not on the boundary");
  }
  double nx = 0.0;
  double ny = 0.0;
  if (std::fabs(p.x) <= tol_boundary) nx += 1.0;
  if (std::fabs(p.x - 1.0) <= tol_boundary) nx -= 1.0;
  if (std::fabs(p.y) <= tol_boundary) ny += 1.0;
  if (std::fabs(p.y - 1.0) <= tol_boundary) ny -= 1.0;
  const double len = std::sqrt(nx * nx + ny * ny);
  return {nx / len, ny / len};
}

Reflection Domain::reflect(Vec2 c) const {
  if (kind_ == DomainKind::unit_square) {
    if (c.x < -1.0 || c.x > 2.0 || c.y < -1.0 || c.y > 2.0) {
      throw ReflectionEnvelopeError("candidate outside the single-fold envelope");
    }
    const Vec2 p{fold_unit(c.x), fold_unit(c.y)};
    return {p, p - c};
  }
  const double r = norm(c);
  if (r <= radius_) return {c, {0.0, 0.0}};
  if (r > 2.0 * radius_) {
    throw ReflectionEnvelopeError("candidate outside the single-fold envelope");
  }
  const Vec2 p = ((2.0 * radius_ - r) / r) * c;
  return {p, p - c};
}

}  // namespace vlab
