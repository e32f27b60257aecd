#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace vlab {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variables an expression may reference. Initial data use (x, y); boundary
/// data use (t, s) and may also read the boundary point (x, y).
struct ExprVars {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  double s = 0.0;
};

/// Small closed-form vocabulary for data fields:
///   numbers, pi, variables x y t s, + - * / ^, unary minus, parentheses,
///   sin cos tan exp log sqrt abs pos neg (positive / negative part),
///   min(a,b) max(a,b), gauss(x0, y0, sigma) = exp(-|(x,y)-(x0,y0)|^2 / (2 sigma^2)).
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double v);

  double operator()(const ExprVars& v) const;
  double eval(double x, double y) const { return (*this)({x, y, 0.0, 0.0}); }

  const std::string& text() const { return text_; }
  bool depends_on_time() const;
  bool is_zero_constant() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace vlab
