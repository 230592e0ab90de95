#pragma once

// Recursive-descent parser for the operator expression grammar.
//
// identifiers:  x1 x2 p1 p2 A1 A2 Ad1 Ad2 I, the imaginary unit i,
//               and named real parameters supplied by the caller
// operators:    + - * / ^ and parentheses; '*' between noncommuting
//               factors is the operator product in written order
// functions:    cos sin cosh sinh exp sqrt (scalar arguments only)
//
// Division requires a scalar divisor; '^' requires a nonnegative integer
// exponent. Any intermediate operator product of degree > 2 is a parse
// error reported with its source span.

#include <cctype>
#include <map>
#include <string>

#include "opalg.hpp"

namespace pbl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, const std::string& src, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos) + " in \"" +
                           src + "\""),
        pos(pos) {}
  std::size_t pos;
};

namespace detail {

class Parser {
 public:
  Parser(const std::string& src, const std::map<std::string, double>& params)
      : src_(src), params_(params) {}

  OperatorPoly parse() {
    OperatorPoly p = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return p;
  }

 private:
  const std::string& src_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, src_, pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  OperatorPoly expr() {
    OperatorPoly v = accept('-') ? -term() : (accept('+'), term());
    for (;;) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }

  OperatorPoly term() {
    OperatorPoly v = power();
    for (;;) {
      std::size_t op_pos = pos_;
      if (accept('*')) {
        v = multiply(v, power(), op_pos);
      } else if (accept('/')) {
        OperatorPoly d = power();
        if (!d.is_scalar()) {
          pos_ = op_pos;
          fail("divisor must be a scalar");
        }
        cplx s = d.scalar_part();
        if (s == cplx(0.0)) {
          pos_ = op_pos;
          fail("division by zero");
        }
        v *= 1.0 / s;
      } else {
        return v;
      }
    }
  }

  OperatorPoly power() {
    OperatorPoly base = primary();
    if (!accept('^')) return base;
    std::size_t exp_pos = pos_;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (start == pos_) fail("exponent must be a nonnegative integer");
    int e = std::stoi(src_.substr(start, pos_ - start));
    OperatorPoly v = OperatorPoly::scalar(1.0);
    for (int k = 0; k < e; ++k) v = multiply(v, base, exp_pos);
    return v;
  }

  OperatorPoly multiply(const OperatorPoly& a, const OperatorPoly& b, std::size_t where) {
    detail::TermMap full = detail::product_full(a.terms(), b.terms());
    double scale = std::max(1.0, a.max_abs_coeff() * b.max_abs_coeff());
    OperatorPoly out;
    for (const auto& [m, c] : full) {
      if (m.degree() > 2) {
        if (std::abs(c) > 1e-12 * scale)
          throw ParseError("operator product exceeds degree 2", src_, where);
        continue;
      }
      out += OperatorPoly::monomial(m, c);
    }
    return out;
  }

  OperatorPoly primary() {
    skip_ws();
    if (accept('(')) {
      OperatorPoly v = expr();
      expect(')');
      return v;
    }
    if (accept('-')) return -primary();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }

  OperatorPoly number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
             (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
      ++pos_;
    try {
      return OperatorPoly::scalar(std::stod(src_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  OperatorPoly identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);

    if (name == "x1") return x_op(1);
    if (name == "x2") return x_op(2);
    if (name == "p1") return p_op(1);
    if (name == "p2") return p_op(2);
    if (name == "A1") return A1();
    if (name == "A2") return A2();
    if (name == "Ad1") return Ad1();
    if (name == "Ad2") return Ad2();
    if (name == "I") return Id();
    if (name == "i") return OperatorPoly::scalar(cplx(0.0, 1.0));
    if (name == "pi") return OperatorPoly::scalar(3.14159265358979323846);

    if (name == "cos" || name == "sin" || name == "cosh" || name == "sinh" ||
        name == "exp" || name == "sqrt") {
      expect('(');
      std::size_t arg_pos = pos_;
      OperatorPoly arg = expr();
      expect(')');
      if (!arg.is_scalar())
        throw ParseError(name + "() requires a scalar argument", src_, arg_pos);
      cplx z = arg.scalar_part();
      cplx r;
      if (name == "cos") r = std::cos(z);
      else if (name == "sin") r = std::sin(z);
      else if (name == "cosh") r = std::cosh(z);
      else if (name == "sinh") r = std::sinh(z);
      else if (name == "exp") r = std::exp(z);
      else r = std::sqrt(z);
      return OperatorPoly::scalar(r);
    }

    auto it = params_.find(name);
    if (it == params_.end()) {
      pos_ = start;
      fail("unbound parameter '" + name + "'");
    }
    return OperatorPoly::scalar(it->second);
  }
};

}  // namespace detail

inline OperatorPoly parse(const std::string& src,
                          const std::map<std::string, double>& params = {}) {
  return detail::Parser(src, params).parse();
}

}  // namespace pbl
