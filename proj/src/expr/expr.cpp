#include "ck/expr.hpp"

#include <utility>

#include "ck/error.hpp"

namespace ck {

std::string to_string(const VarRef& v) {
  switch (v.kind) {
    case VarKind::x: return "x[" + std::to_string(v.a) + "]";
    case VarKind::p: return "p[" + std::to_string(v.a) + "]";
    case VarKind::pd: return "pd[" + std::to_string(v.a) + "][" + std::to_string(v.b) + "]";
    case VarKind::t: return "t";
  }
  return "?";
}

std::size_t flat_index(const VarRef& v, const Dims& d) {
  switch (v.kind) {
    case VarKind::x: return static_cast<std::size_t>(v.a - 1);
    case VarKind::p: return static_cast<std::size_t>(d.n + v.a - 1);
    case VarKind::pd: return static_cast<std::size_t>(d.n + d.m + (v.a - 1) * d.k + (v.b - 1));
    case VarKind::t: return d.var_count();
  }
  return 0;
}

VarRef var_from_flat(std::size_t index, const Dims& d) {
  const int i = static_cast<int>(index);
  if (i < d.n) return VarRef::x(i + 1);
  if (i < d.n + d.m) return VarRef::p(i - d.n + 1);
  if (i < d.n + d.m + d.m * d.k) {
    const int r = i - d.n - d.m;
    return VarRef::pd(r / d.k + 1, r % d.k + 1);
  }
  return VarRef::t();
}

void check_bounds(const VarRef& v, const Dims& d, bool allow_t) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::index_range, to_string(v) + " is out of range: " + why);
  };
  switch (v.kind) {
    case VarKind::x:
      if (v.a < 1 || v.a > d.n) fail("need 1 <= i <= n = " + std::to_string(d.n));
      break;
    case VarKind::p:
      if (v.a < 1 || v.a > d.m) fail("need 1 <= A <= m = " + std::to_string(d.m));
      break;
    case VarKind::pd:
      if (v.a < 1 || v.a > d.m) fail("need 1 <= A <= m = " + std::to_string(d.m));
      if (v.b < 1 || v.b > d.k) fail("need 1 <= L <= k = " + std::to_string(d.k));
      break;
    case VarKind::t:
      if (!allow_t) throw Error(ErrorCode::index_range, "the symbol t is only allowed in Monge-Ampere right-hand sides");
      break;
  }
}

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::exp: return "exp";
    case Primitive::log: return "log";
    case Primitive::sin: return "sin";
    case Primitive::cos: return "cos";
    case Primitive::sqrt: return "sqrt";
  }
  return "?";
}

namespace {

Expression make_node(Node n) { return Expression(std::make_shared<const Node>(std::move(n))); }

}  // namespace

Expression::Expression() : Expression(constant(0)) {}

Expression Expression::constant(const Rational& value) {
  Node n;
  n.kind = NodeKind::constant;
  n.value = value;
  return make_node(std::move(n));
}

Expression Expression::variable(const VarRef& v) {
  Node n;
  n.kind = NodeKind::variable;
  n.var = v;
  return make_node(std::move(n));
}

Expression Expression::sum(std::vector<Expression> terms) {
  if (terms.size() < 2) throw Error(ErrorCode::invalid_argument, "a sum needs at least two terms");
  Node n;
  n.kind = NodeKind::sum;
  n.children = std::move(terms);
  return make_node(std::move(n));
}

Expression Expression::product(std::vector<Expression> factors) {
  if (factors.size() < 2) throw Error(ErrorCode::invalid_argument, "a product needs at least two factors");
  Node n;
  n.kind = NodeKind::product;
  n.children = std::move(factors);
  return make_node(std::move(n));
}

Expression Expression::quotient(Expression num, Expression den) {
  if (den.is_constant(0)) throw Error(ErrorCode::division_by_zero, "quotient with constant zero denominator");
  Node n;
  n.kind = NodeKind::quotient;
  n.children = {std::move(num), std::move(den)};
  return make_node(std::move(n));
}

Expression Expression::power(Expression base, int exponent) {
  if (exponent < 0) throw Error(ErrorCode::invalid_argument, "negative power; use a quotient");
  Node n;
  n.kind = NodeKind::power;
  n.children = {std::move(base)};
  n.exponent = exponent;
  return make_node(std::move(n));
}

Expression Expression::apply(Primitive fn, Expression arg) {
  Node n;
  n.kind = NodeKind::primitive;
  n.fn = fn;
  n.children = {std::move(arg)};
  return make_node(std::move(n));
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant: return a.value() == b.value();
    case NodeKind::variable: return a.var() == b.var();
    case NodeKind::power:
      if (a.exponent() != b.exponent()) return false;
      break;
    case NodeKind::primitive:
      if (a.fn() != b.fn()) return false;
      break;
    default: break;
  }
  return a.children() == b.children();
}

Expression make_sum(const Expression& a, const Expression& b) {
  if (a.is_constant(0)) return b;
  if (b.is_constant(0)) return a;
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.value() + b.value());
  std::vector<Expression> terms;
  for (const Expression* e : {&a, &b}) {
    if (e->kind() == NodeKind::sum) {
      terms.insert(terms.end(), e->children().begin(), e->children().end());
    } else {
      terms.push_back(*e);
    }
  }
  return Expression::sum(std::move(terms));
}

Expression negate(const Expression& e) {
  if (e.is_constant()) return Expression::constant(-e.value());
  if (e.kind() == NodeKind::product && e.children().front().is_constant()) {
    const Rational c = -e.children().front().value();
    std::vector<Expression> rest(e.children().begin() + 1, e.children().end());
    if (c == 1) return rest.size() == 1 ? rest.front() : Expression::product(std::move(rest));
    rest.insert(rest.begin(), Expression::constant(c));
    return Expression::product(std::move(rest));
  }
  return Expression::product({Expression::constant(-1), e});
}

Expression make_difference(const Expression& a, const Expression& b) { return make_sum(a, negate(b)); }

Expression make_product(const Expression& a, const Expression& b) {
  if (a.is_constant(0) || b.is_constant(0)) return Expression::constant(0);
  if (a.is_constant(1)) return b;
  if (b.is_constant(1)) return a;
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.value() * b.value());
  Rational coeff = 1;
  std::vector<Expression> factors;
  for (const Expression* e : {&a, &b}) {
    if (e->is_constant()) {
      coeff *= e->value();
    } else if (e->kind() == NodeKind::product) {
      for (const auto& f : e->children()) {
        if (f.is_constant()) {
          coeff *= f.value();
        } else {
          factors.push_back(f);
        }
      }
    } else {
      factors.push_back(*e);
    }
  }
  if (coeff == 0) return Expression::constant(0);
  if (coeff != 1) factors.insert(factors.begin(), Expression::constant(coeff));
  if (factors.size() == 1) return factors.front();
  return Expression::product(std::move(factors));
}

Expression make_quotient(const Expression& a, const Expression& b) {
  if (b.is_constant(0)) throw Error(ErrorCode::division_by_zero, "quotient with constant zero denominator");
  if (a.is_constant(0)) return Expression::constant(0);
  if (b.is_constant(1)) return a;
  if (b.is_constant()) return make_product(Expression::constant(1 / b.value()), a);
  return Expression::quotient(a, b);
}

Expression make_power(const Expression& base, int exponent) {
  if (exponent == 0) return Expression::constant(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    Rational r = 1;
    for (int i = 0; i < exponent; ++i) r *= base.value();
    return Expression::constant(r);
  }
  return Expression::power(base, exponent);
}

Expression differentiate(const Expression& e, const VarRef& v) {
  switch (e.kind()) {
    case NodeKind::constant:
      return Expression::constant(0);
    case NodeKind::variable:
      return Expression::constant(e.var() == v ? 1 : 0);
    case NodeKind::sum: {
      Expression acc = Expression::constant(0);
      for (const auto& c : e.children()) acc = make_sum(acc, differentiate(c, v));
      return acc;
    }
    case NodeKind::product: {
      const auto& ch = e.children();
      Expression acc = Expression::constant(0);
      for (std::size_t i = 0; i < ch.size(); ++i) {
        Expression d = differentiate(ch[i], v);
        if (d.is_constant(0)) continue;
        Expression term = d;
        for (std::size_t j = 0; j < ch.size(); ++j) {
          if (j != i) term = make_product(term, ch[j]);
        }
        acc = make_sum(acc, term);
      }
      return acc;
    }
    case NodeKind::quotient: {
      const Expression& num = e.children()[0];
      const Expression& den = e.children()[1];
      Expression dn = differentiate(num, v);
      Expression dd = differentiate(den, v);
      Expression first = make_quotient(dn, den);
      if (dd.is_constant(0)) return first;
      Expression second = make_quotient(make_product(num, dd), make_power(den, 2));
      return make_difference(first, second);
    }
    case NodeKind::power: {
      const Expression& base = e.children()[0];
      Expression db = differentiate(base, v);
      if (db.is_constant(0) || e.exponent() == 0) return Expression::constant(0);
      return make_product(make_product(Expression::constant(e.exponent()), make_power(base, e.exponent() - 1)), db);
    }
    case NodeKind::primitive: {
      const Expression& arg = e.children()[0];
      Expression da = differentiate(arg, v);
      if (da.is_constant(0)) return Expression::constant(0);
      return make_product(PrimitiveTable::instance().derivative(e.fn(), arg), da);
    }
  }
  return Expression::constant(0);
}

Expression substitute(const Expression& e, const std::map<VarRef, Expression>& replacement) {
  switch (e.kind()) {
    case NodeKind::constant:
      return e;
    case NodeKind::variable: {
      auto it = replacement.find(e.var());
      return it == replacement.end() ? e : it->second;
    }
    case NodeKind::sum: {
      Expression acc = Expression::constant(0);
      for (const auto& c : e.children()) acc = make_sum(acc, substitute(c, replacement));
      return acc;
    }
    case NodeKind::product: {
      Expression acc = Expression::constant(1);
      for (const auto& c : e.children()) acc = make_product(acc, substitute(c, replacement));
      return acc;
    }
    case NodeKind::quotient:
      return make_quotient(substitute(e.children()[0], replacement), substitute(e.children()[1], replacement));
    case NodeKind::power:
      return make_power(substitute(e.children()[0], replacement), e.exponent());
    case NodeKind::primitive:
      return Expression::apply(e.fn(), substitute(e.children()[0], replacement));
  }
  return e;
}

namespace {

void collect(const Expression& e, std::set<VarRef>& out) {
  if (e.kind() == NodeKind::variable) {
    out.insert(e.var());
    return;
  }
  for (const auto& c : e.children()) collect(c, out);
}

}  // namespace

std::set<VarRef> variables(const Expression& e) {
  std::set<VarRef> out;
  collect(e, out);
  return out;
}

bool depends_on(const Expression& e, const VarRef& v) {
  if (e.kind() == NodeKind::variable) return e.var() == v;
  for (const auto& c : e.children()) {
    if (depends_on(c, v)) return true;
  }
  return false;
}

bool contains_primitive(const Expression& e) {
  if (e.kind() == NodeKind::primitive) return true;
  for (const auto& c : e.children()) {
    if (contains_primitive(c)) return true;
  }
  return false;
}

std::size_t node_count(const Expression& e) {
  std::size_t count = 1;
  for (const auto& c : e.children()) count += node_count(c);
  return count;
}

}  // namespace ck
