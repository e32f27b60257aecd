#include "vortexlab/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace vlab {

struct Expression::Node {
  enum class Kind { number, var_x, var_y, var_t, var_s, neg, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, std::vector<NodePtr> args = {}, double value = 0.0, std::string fn = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  n->value = value;
  n->fn = std::move(fn);
  return n;
}

struct FunctionSpec {
  const char* name;
  std::size_t arity;
};

constexpr FunctionSpec kFunctions[] = {
    {"sin", 1}, {"cos", 1},  {"tan", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1},  {"abs", 1},
    {"pos", 1}, {"neg", 1},  {"min", 2}, {"max", 2}, {"gauss", 3},
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Kind::add, {lhs, term()});
      else if (accept('-')) lhs = make(Node::Kind::sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Kind::mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Node::Kind::div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  // right associative; binds tighter than unary minus on its left operand
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Node::Kind::number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Node::Kind::var_x);
      if (name == "y") return make(Node::Kind::var_y);
      if (name == "t") return make(Node::Kind::var_t);
      if (name == "s") return make(Node::Kind::var_s);
      if (name == "pi") return make(Node::Kind::number, {}, std::numbers::pi);
      for (const auto& f : kFunctions) {
        if (name != f.name) continue;
        if (!accept('(')) fail("expected '(' after " + name);
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')' closing " + name);
        if (args.size() != f.arity) {
          fail(name + " takes " + std::to_string(f.arity) + " argument(s)");
        }
        return make(Node::Kind::call, std::move(args), 0.0, name);
      }
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double evaluate_node(const Node& n, const ExprVars& v) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::number: return n.value;
    case K::var_x: return v.x;
    case K::var_y: return v.y;
    case K::var_t: return v.t;
    case K::var_s: return v.s;
    case K::neg: return -evaluate_node(*n.args[0], v);
    case K::add: return evaluate_node(*n.args[0], v) + evaluate_node(*n.args[1], v);
    case K::sub: return evaluate_node(*n.args[0], v) - evaluate_node(*n.args[1], v);
    case K::mul: return evaluate_node(*n.args[0], v) * evaluate_node(*n.args[1], v);
    case K::div: return evaluate_node(*n.args[0], v) / evaluate_node(*n.args[1], v);
    case K::pow: return std::pow(evaluate_node(*n.args[0], v), evaluate_node(*n.args[1], v));
    case K::call: break;
  }
  const double a = evaluate_node(*n.args[0], v);
  const std::string& f = n.fn;
  if (f == "sin") return std::sin(a);
  if (f == "cos") return std::cos(a);
  if (f == "tan") return std::tan(a);
  if (f == "exp") return std::exp(a);
  if (f == "log") return std::log(a);
  if (f == "sqrt") return std::sqrt(a);
  if (f == "abs") return std::fabs(a);
  if (f == "pos") return a > 0.0 ? a : 0.0;
  if (f == "neg") return a < 0.0 ? -a : 0.0;
  const double b = evaluate_node(*n.args[1], v);
  if (f == "min") return std::min(a, b);
  if (f == "max") return std::max(a, b);
  // gauss
  const double sigma = evaluate_node(*n.args[2], v);
  const double dx = v.x - a, dy = v.y - b;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

bool uses_time(const Node& n) {
  if (n.kind == Node::Kind::var_t) return true;
  for (const auto& a : n.args) {
    if (uses_time(*a)) return true;
  }
  return false;
}

}  // namespace

Expression::Expression() : root_(make(Node::Kind::number)), text_("0") {}

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expression Expression::constant(double v) {
  Expression e;
  e.root_ = make(Node::Kind::number, {}, v);
  e.text_ = std::to_string(v);
  return e;
}

double Expression::operator()(const ExprVars& v) const { return evaluate_node(*root_, v); }

bool Expression::depends_on_time() const { return uses_time(*root_); }

bool Expression::is_zero_constant() const {
  return root_->kind == Node::Kind::number && root_->value == 0.0;
}

}  // namespace vlab
