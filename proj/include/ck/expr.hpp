#pragma once

// Expression language for right-hand sides F^A_alpha(x, p, p').
//
// Variables are written x[i], p[A] and pd[A][L] (1-based). Monge-Ampere
// right-hand sides may additionally use the reserved symbol t. Nodes are
// immutable and shared; an Expression is a cheap handle.

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ck/polynomial.hpp"
#include "ck/rational.hpp"
#include "ck/series.hpp"

namespace ck {

/// Dimensions of a system: n independent variables, k of them tangential, m unknowns.
struct Dims {
  int n = 0;
  int k = 0;
  int m = 0;

  int normal_count() const { return n - k; }
  /// Number of flat (x, p, pd) coordinates.
  std::size_t var_count() const { return static_cast<std::size_t>(n + m + m * k); }
};

enum class VarKind { x, p, pd, t };

struct VarRef {
  VarKind kind = VarKind::x;
  int a = 0;  ///< i for x, A for p and pd
  int b = 0;  ///< L for pd, unused otherwise

  static VarRef x(int i) { return {VarKind::x, i, 0}; }
  static VarRef p(int A) { return {VarKind::p, A, 0}; }
  static VarRef pd(int A, int L) { return {VarKind::pd, A, L}; }
  static VarRef t() { return {VarKind::t, 0, 0}; }

  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

std::string to_string(const VarRef& v);

/// Flat index of v in the layout [x(n), p(m), pd(A-major, m*k), t].
std::size_t flat_index(const VarRef& v, const Dims& dims);
VarRef var_from_flat(std::size_t index, const Dims& dims);
/// Throws Error(index_range) when v is out of bounds for dims.
void check_bounds(const VarRef& v, const Dims& dims, bool allow_t = false);

enum class NodeKind { constant, variable, sum, product, quotient, power, primitive };
enum class Primitive { exp, log, sin, cos, sqrt };

const char* primitive_name(Primitive p);

class Expression;

struct Node {
  NodeKind kind = NodeKind::constant;
  Rational value;                       // constant
  VarRef var;                           // variable
  std::vector<Expression> children;     // sum, product (n-ary); quotient (num, den); power, primitive (arg)
  int exponent = 0;                     // power
  Primitive fn = Primitive::exp;        // primitive
};

class Expression {
 public:
  Expression();  // constant zero
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Expression constant(const Rational& value);
  static Expression variable(const VarRef& v);
  /// Raw constructors; no folding. Sums and products need at least two children.
  static Expression sum(std::vector<Expression> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression quotient(Expression num, Expression den);
  static Expression power(Expression base, int exponent);
  static Expression apply(Primitive fn, Expression arg);

  NodeKind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  const Rational& value() const { return node_->value; }
  const VarRef& var() const { return node_->var; }
  const std::vector<Expression>& children() const { return node_->children; }
  int exponent() const { return node_->exponent; }
  Primitive fn() const { return node_->fn; }

  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_constant(const Rational& v) const { return is_constant() && value() == v; }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  std::shared_ptr<const Node> node_;
};

// Folding constructors used by differentiation and substitution.
Expression make_sum(const Expression& a, const Expression& b);
Expression make_difference(const Expression& a, const Expression& b);
Expression make_product(const Expression& a, const Expression& b);
Expression make_quotient(const Expression& a, const Expression& b);
Expression make_power(const Expression& base, int exponent);
Expression negate(const Expression& e);

struct ParseOptions {
  Dims dims;
  bool allow_t = false;
};

Expression parse_expression(std::string_view text, const ParseOptions& options);
inline Expression parse_expression(std::string_view text, const Dims& dims) {
  return parse_expression(text, ParseOptions{dims, false});
}

std::string to_string(const Expression& e);

Expression differentiate(const Expression& e, const VarRef& v);

Expression substitute(const Expression& e, const std::map<VarRef, Expression>& replacement);

std::set<VarRef> variables(const Expression& e);
bool depends_on(const Expression& e, const VarRef& v);
bool contains_primitive(const Expression& e);
std::size_t node_count(const Expression& e);

/// Series evaluation. Every variable of e must be bound; all bound series share arity and order.
struct SeriesEnv {
  std::size_t arity = 0;
  int order = 0;
  std::map<VarRef, TruncatedSeries> bindings;
};

TruncatedSeries evaluate(const Expression& e, const SeriesEnv& env);

/// Exact point evaluation. Primitives evaluate only at their exact base values.
Rational evaluate_at(const Expression& e, const std::map<VarRef, Rational>& point);

/// Rational-function normal form over the flat coordinates; std::nullopt when e contains primitives.
std::optional<RationalFunction> to_rational_function(const Expression& e, const Dims& dims);

/// Univariate analytic primitives: symbolic derivative plus Taylor coefficients at admissible bases.
class PrimitiveTable {
 public:
  static const PrimitiveTable& instance();

  std::optional<Primitive> lookup(std::string_view name) const;
  Expression derivative(Primitive fn, const Expression& arg) const;
  /// Exact value at an admissible argument, std::nullopt otherwise.
  std::optional<Rational> value_at(Primitive fn, const Rational& arg) const;
  /// Coefficients c_j of fn(base + s) = sum_j c_j s^j, j <= count - 1.
  std::vector<Rational> taylor(Primitive fn, const Rational& base, int count) const;
  /// Names the guard an inadmissible argument fails.
  const char* guard(Primitive fn) const;
  AnalyticKind analytic_kind(Primitive fn) const;

 private:
  PrimitiveTable() = default;
};

}  // namespace ck
