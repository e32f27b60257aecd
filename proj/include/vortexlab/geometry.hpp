#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class DomainKind { unit_square, unit_disk };

/// Thrown when an operation has no implementation for the configured domain.
class UnsupportedDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a reflected candidate lies beyond the single-fold envelope,
/// which means the time step is too large for the scheme.
class ReflectionEnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundaryPoint {
  double s = 0.0;          // parameter in [0,1)
  Vec2 position;
  Vec2 normal;             // inward, unit length
  double arclength_factor = 0.0;  // |gamma'(s)|
};

struct Reflection {
  Vec2 position;
  Vec2 displacement;  // position - candidate
};

/// The computational domain: the unit square [0,1]^2 or a disk of radius R
/// centred at the origin. Both are convex, which the reflection scheme needs.
class Domain {
 public:
  static Domain unit_square() { return Domain(DomainKind::unit_square, 1.0); }
  static Domain disk(double radius = 1.0);
  static Domain from_name(const std::string& name, double radius = 1.0);

  DomainKind kind() const { return kind_; }
  double radius() const { return radius_; }
  const char* name() const;

  double perimeter() const;
  double area() const;

  /// Closed domain membership with an absolute slack.
  bool contains(Vec2 p, double tol = 0.0) const;
  /// Distance to the boundary for points of the closure; 0 on the boundary.
  double distance_to_boundary(Vec2 p) const;

  /// gamma(s): counterclockwise traversal, the square starting at (0,0),
  /// the disk at (R,0).
  BoundaryPoint boundary_map(double s) const;

  /// Inward unit normal at a boundary point; corners of the square use the
  /// normalised diagonal pointing into the square.
  Vec2 inward_normal(Vec2 p, double tol_boundary = 1e-12) const;

  /// Discrete Skorokhod map: coordinate folding on the square, radial
  /// folding on the disk. Points of the closure are returned unchanged.
  Reflection reflect(Vec2 candidate) const;

  /// True when gamma(s) lies within tol of a square corner.
  bool near_corner(double s, double tol) const;

 private:
  Domain(DomainKind kind, double radius) : kind_(kind), radius_(radius) {}

  DomainKind kind_;
  double radius_;
};

}  // namespace vlab
