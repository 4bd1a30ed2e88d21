#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "ck/series.hpp"

namespace ck {

/// Sparse multivariate polynomial over the rationals (no truncation).
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, Rational, GradedOrder>;

  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t var);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  void add_term(const MultiIndex& e, const Rational& c);

  Rational evaluate(const std::vector<Rational>& point) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t nvars_;
  Terms terms_;
};

Polynomial power(const Polynomial& p, int exponent);

/// Quotient of polynomials, kept unreduced; the denominator is never the zero polynomial.
struct RationalFunction {
  Polynomial num;
  Polynomial den;

  static RationalFunction constant(std::size_t nvars, const Rational& c);
  bool is_zero() const { return num.is_zero(); }
};

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
RationalFunction power(const RationalFunction& f, int exponent);

}  // namespace ck
