#pragma once

// Exact truncated multivariate power series over the rationals.
//
// A TruncatedSeries is a germ at the origin: the sparse set of coefficients of
// monomials y^I with |I| <= order. Truncation is by total degree. Every
// operation returns a series whose order is the minimum of the operand orders
// (adjusted by one for derivative / antiderivative).

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ck/rational.hpp"

namespace ck {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t arity) : exps_(arity, 0) {}
  explicit MultiIndex(std::vector<int> exps);
  MultiIndex(std::initializer_list<int> exps) : MultiIndex(std::vector<int>(exps)) {}

  static MultiIndex unit(std::size_t arity, std::size_t var, int power = 1);

  std::size_t arity() const { return exps_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }

  /// Copy with exponent of `var` shifted by `delta`; the result must stay nonnegative.
  MultiIndex shifted(std::size_t var, int delta) const;
  MultiIndex operator+(const MultiIndex& other) const;

  /// True when every exponent is <= the corresponding exponent of `other`.
  bool divides(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Graded lexicographic order: total degree first, then exponent vectors.
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.exponents() > b.exponents();
  }
};

class TruncatedSeries {
 public:
  using Terms = std::map<MultiIndex, Rational, GradedOrder>;

  TruncatedSeries() = default;
  TruncatedSeries(std::size_t arity, int order);

  static TruncatedSeries constant(std::size_t arity, int order, const Rational& value);
  /// shift + y_var
  static TruncatedSeries variable(std::size_t arity, int order, std::size_t var,
                                  const Rational& shift = 0);
  static TruncatedSeries monomial(int order, const MultiIndex& exps, const Rational& coeff);

  std::size_t arity() const { return arity_; }
  int order() const { return order_; }
  const Terms& terms() const { return terms_; }

  Rational coefficient(const MultiIndex& exps) const;
  Rational constant_term() const;

  /// Sets a coefficient; zeros are pruned, indices above the order are dropped.
  void set_coefficient(const MultiIndex& exps, const Rational& value);
  void add_to_coefficient(const MultiIndex& exps, const Rational& value);

  bool is_zero() const { return terms_.empty(); }
  /// Lowest total degree carrying a nonzero coefficient, -1 for the zero series.
  int lowest_degree() const;

  TruncatedSeries truncated(int order) const;
  TruncatedSeries homogeneous_part(int degree) const;

  /// Value of the partial derivative with multi-index `exps` at the origin.
  Rational derivative_at_origin(const MultiIndex& exps) const;

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.arity_ == b.arity_ && a.order_ == b.order_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t arity_ = 0;
  int order_ = 0;
  Terms terms_;
};

enum class SeriesOp { add, sub, mul };

TruncatedSeries combine(SeriesOp kind, const TruncatedSeries& s, const TruncatedSeries& t);

TruncatedSeries operator+(const TruncatedSeries& s, const TruncatedSeries& t);
TruncatedSeries operator-(const TruncatedSeries& s, const TruncatedSeries& t);
TruncatedSeries operator*(const TruncatedSeries& s, const TruncatedSeries& t);
TruncatedSeries operator-(const TruncatedSeries& s);
TruncatedSeries operator*(const Rational& c, const TruncatedSeries& s);

TruncatedSeries power(const TruncatedSeries& s, int exponent);

enum class AnalyticKind { reciprocal, sqrt, exp, log, sin, cos };

const char* analytic_name(AnalyticKind kind);

/// Exact composition with an analytic function through the homogeneous-degree
/// recurrences. Admissible constant terms: nonzero (reciprocal), square of a
/// positive rational (sqrt), 0 (exp, sin, cos), 1 (log).
TruncatedSeries unary_analytic(AnalyticKind kind, const TruncatedSeries& s);

enum class CalculusKind { derivative, antiderivative };

TruncatedSeries calculus(CalculusKind kind, const TruncatedSeries& s, std::size_t var);
TruncatedSeries derivative(const TruncatedSeries& s, std::size_t var);
TruncatedSeries antiderivative(const TruncatedSeries& s, std::size_t var);

/// sum_k taylor[k] * (s - s(0))^k, truncated at s.order().
TruncatedSeries compose_univariate(std::span<const Rational> taylor, const TruncatedSeries& s);

/// Substitutes y_i -> sum_j rows[i][j] z_j, producing a series in `new_arity` variables.
TruncatedSeries linear_substitute(const TruncatedSeries& s,
                                  const std::vector<std::vector<Rational>>& rows,
                                  std::size_t new_arity);

/// Re-indexes the variables: old variable i becomes variable var_map[i] of the result.
TruncatedSeries embed(const TruncatedSeries& s, std::size_t new_arity,
                      std::span<const std::size_t> var_map);

/// Sets the listed variables to zero and drops them, keeping the others in order.
TruncatedSeries restrict_to_zero(const TruncatedSeries& s, std::span<const std::size_t> vars);

/// True when s - t vanishes through total degree `order`.
bool agree_to_order(const TruncatedSeries& s, const TruncatedSeries& t, int order);

/// Human-readable polynomial form, e.g. "1 + 2*y1 - 1/2*y1^2*y2".
std::string to_string(const TruncatedSeries& s, const std::string& var_prefix = "y");

}  // namespace ck
