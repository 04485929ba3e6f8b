#include "floquet/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "floquet/error.hpp"

namespace floquet {

Expression Expression::constant(double value) {
  Expression e;
  e.kind_ = Kind::Constant;
  e.value_ = value;
  return e;
}

Expression Expression::time() {
  Expression e;
  e.kind_ = Kind::Time;
  return e;
}

Expression Expression::negate(Expression arg) {
  Expression e;
  e.kind_ = Kind::Negate;
  e.children_.push_back(std::move(arg));
  return e;
}

Expression Expression::sum(std::vector<Expression> terms) {
  if (terms.size() == 1) return std::move(terms.front());
  Expression e;
  e.kind_ = Kind::Sum;
  e.children_ = std::move(terms);
  return e;
}

Expression Expression::product(std::vector<Expression> factors) {
  if (factors.size() == 1) return std::move(factors.front());
  Expression e;
  e.kind_ = Kind::Product;
  e.children_ = std::move(factors);
  return e;
}

Expression Expression::power(Expression base, int exponent) {
  if (exponent < 0) throw InputError("negative exponents are not part of the expression grammar");
  Expression e;
  e.kind_ = Kind::Power;
  e.exponent_ = exponent;
  e.children_.push_back(std::move(base));
  return e;
}

Expression Expression::sin(Expression arg) {
  Expression e;
  e.kind_ = Kind::Sin;
  e.children_.push_back(std::move(arg));
  return e;
}

Expression Expression::cos(Expression arg) {
  Expression e;
  e.kind_ = Kind::Cos;
  e.children_.push_back(std::move(arg));
  return e;
}

Expression Expression::exp(Expression arg) {
  Expression e;
  e.kind_ = Kind::Exp;
  e.children_.push_back(std::move(arg));
  return e;
}

double Expression::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Time:
      return t;
    case Kind::Negate:
      return -children_[0](t);
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& c : children_) acc += c(t);
      return acc;
    }
    case Kind::Product: {
      double acc = 1.0;
      for (const auto& c : children_) acc *= c(t);
      return acc;
    }
    case Kind::Power: {
      const double base = children_[0](t);
      double acc = 1.0;
      for (int i = 0; i < exponent_; ++i) acc *= base;
      return acc;
    }
    case Kind::Sin:
      return std::sin(children_[0](t));
    case Kind::Cos:
      return std::cos(children_[0](t));
    case Kind::Exp:
      return std::exp(children_[0](t));
  }
  return 0.0;
}

bool Expression::is_identically_zero() const {
  switch (kind_) {
    case Kind::Constant:
      return value_ == 0.0;
    case Kind::Negate:
      return children_[0].is_identically_zero();
    case Kind::Sum:
      for (const auto& c : children_)
        if (!c.is_identically_zero()) return false;
      return true;
    case Kind::Product:
      for (const auto& c : children_)
        if (c.is_identically_zero()) return true;
      return false;
    case Kind::Power:
      return exponent_ > 0 && children_[0].is_identically_zero();
    default:
      return false;
  }
}

bool Expression::is_constant() const {
  if (kind_ == Kind::Time) return false;
  for (const auto& c : children_)
    if (!c.is_constant()) return false;
  return true;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<Expression>& items, const char* sep) {
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i].to_string();
  }
  return out + ")";
}

}  // namespace

std::string Expression::to_string() const {
  switch (kind_) {
    case Kind::Constant:
      return std::signbit(value_) ? "(" + format_number(value_) + ")" : format_number(value_);
    case Kind::Time:
      return "t";
    case Kind::Negate:
      return "(-" + children_[0].to_string() + ")";
    case Kind::Sum:
      return join(children_, " + ");
    case Kind::Product:
      return join(children_, " * ");
    case Kind::Power:
      return "(" + children_[0].to_string() + "^" + std::to_string(exponent_) + ")";
    case Kind::Sin:
      return "sin(" + children_[0].to_string() + ")";
    case Kind::Cos:
      return "cos(" + children_[0].to_string() + ")";
    case Kind::Exp:
      return "exp(" + children_[0].to_string() + ")";
  }
  return {};
}

namespace {

// Recursive-descent parser.
//   sum     := product (('+' | '-') product)*
//   product := unary ('*' unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   primary := number | 't' | 'pi' | name '(' sum ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    Expression e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression parse_sum() {
    std::vector<Expression> terms;
    terms.push_back(parse_product());
    for (;;) {
      if (accept('+')) {
        terms.push_back(parse_product());
      } else if (accept('-')) {
        terms.push_back(negated(parse_product()));
      } else {
        break;
      }
    }
    return Expression::sum(std::move(terms));
  }

  Expression parse_product() {
    std::vector<Expression> factors;
    factors.push_back(parse_unary());
    while (accept('*')) factors.push_back(parse_unary());
    return Expression::product(std::move(factors));
  }

  static Expression negated(Expression e) {
    if (e.kind() == Expression::Kind::Constant) return Expression::constant(-e.value());
    return Expression::negate(std::move(e));
  }

  Expression parse_unary() {
    if (accept('-')) return negated(parse_unary());
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    if (!accept('^')) return base;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '-') fail("negative exponent (no division in the grammar)");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer exponent");
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    if (ec != std::errc() || exponent > 64) {
      pos_ = start;
      fail("exponent out of range");
    }
    (void)ptr;
    return Expression::power(std::move(base), exponent);
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (exp_start == pos_) pos_ = save;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expression::constant(value);
  }

  Expression parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      Expression inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "t") return Expression::time();
      if (name == "pi") return Expression::constant(std::numbers::pi);
      Expression (*fn)(Expression) = nullptr;
      if (name == "sin") fn = &Expression::sin;
      if (name == "cos") fn = &Expression::cos;
      if (name == "exp") fn = &Expression::exp;
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      expect('(');
      Expression arg = parse_sum();
      expect(')');
      return fn(std::move(arg));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

}  // namespace floquet
