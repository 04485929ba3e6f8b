#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace floquet {

/// Scalar function of time built from a closed grammar: constants, `t`,
/// sums, products, non-negative integer powers, sin, cos and exp.
/// There is no division node, so evaluation is total on finite input.
class Expression {
 public:
  enum class Kind { Constant, Time, Negate, Sum, Product, Power, Sin, Cos, Exp };

  Expression() = default;

  static Expression constant(double value);
  static Expression time();
  static Expression negate(Expression arg);
  static Expression sum(std::vector<Expression> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression power(Expression base, int exponent);
  static Expression sin(Expression arg);
  static Expression cos(Expression arg);
  static Expression exp(Expression arg);

  double operator()(double t) const;

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  int exponent() const noexcept { return exponent_; }
  const std::vector<Expression>& children() const noexcept { return children_; }

  /// True when the tree is zero for every t by construction (a zero constant,
  /// a product with such a factor, ...). Used for structural diagonality.
  bool is_identically_zero() const;
  /// True when the tree contains no `t`.
  bool is_constant() const;

  /// Fully parenthesized text that re-parses to an evaluation-identical tree.
  std::string to_string() const;

 private:
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  int exponent_ = 0;
  std::vector<Expression> children_;
};

/// Parses `text` with the usual precedence (`^` > unary minus > `*` > `+ -`).
/// Recognized names: `t`, `pi`, `sin`, `cos`, `exp`.
/// Throws ParseError carrying the offending position.
Expression parse_expression(std::string_view text);

}  // namespace floquet
