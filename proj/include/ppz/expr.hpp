#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppz/geometry.hpp"
#include "ppz/target.hpp"

namespace ppz::expr {

/// Real mode binds x (p = 1) or x1..xp; complex mode binds s = sigma + i t.
struct EvalMode {
  enum class Kind { real, complex };
  Kind kind = Kind::real;
  std::size_t dim = 1;

  static EvalMode real(std::size_t p);
  static EvalMode complex() { return {Kind::complex, 2}; }
  bool is_complex() const { return kind == Kind::complex; }
};

/// Syntax or binding error. offset() is the byte position in the source.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Op { number, imag, var, neg, add, sub, mul, div, pow, call };

enum class Fn { sin, cos, tan, exp, log, sqrt, abs, re, im, conj };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::number;
  double value = 0.0;    // number, imag
  std::size_t var = 0;   // var: 0-based axis
  Fn fn = Fn::sin;       // call
  Expr lhs;              // unary operand or left side
  Expr rhs;
};

Expr parse(std::string_view src, EvalMode mode);

/// `;`-separated component expressions (real mode only for more than one).
std::vector<Expr> parse_components(std::string_view src, EvalMode mode);

/// Real-mode evaluation; x must have mode.dim coordinates.
double eval_real(const Expr& e, const Point& x);
/// Complex-mode evaluation at s.
std::complex<double> eval_complex(const Expr& e, std::complex<double> s);

/// Fully parenthesized text that parses back to the same tree.
std::string to_string(const Expr& e, EvalMode mode);

/// Same shape, same operators, bit-identical literals.
bool structurally_equal(const Expr& a, const Expr& b);

/// Wraps parsed components as a target: one real component gives a
/// real-scalar target, several give real-vector(q), complex mode gives a
/// complex target.
TargetFunction to_target(std::vector<Expr> components, EvalMode mode, std::string description = {});
TargetFunction to_target(std::string_view src, EvalMode mode);

/// Feasibility predicate such as "x1 + x2 >= 1 && x1 < 3". Comparisons
/// are <, <=, >, >=, ==, != joined by && and ||. Operands are real-mode
/// expressions; for complex targets use x1 = sigma and x2 = t.
TargetFunction::Constraint parse_constraint(std::string_view src, std::size_t dim);

}  // namespace ppz::expr
