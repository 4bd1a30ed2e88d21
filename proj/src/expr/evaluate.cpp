#include <utility>

#include "ck/error.hpp"
#include "ck/expr.hpp"

namespace ck {

TruncatedSeries evaluate(const Expression& e, const SeriesEnv& env) {
  switch (e.kind()) {
    case NodeKind::constant:
      return TruncatedSeries::constant(env.arity, env.order, e.value());
    case NodeKind::variable: {
      auto it = env.bindings.find(e.var());
      if (it == env.bindings.end()) throw Error(ErrorCode::unbound_variable, "unbound variable " + to_string(e.var()));
      return it->second.order() > env.order ? it->second.truncated(env.order) : it->second;
    }
    case NodeKind::sum: {
      TruncatedSeries acc = evaluate(e.children()[0], env);
      for (std::size_t i = 1; i < e.children().size(); ++i) acc = acc + evaluate(e.children()[i], env);
      return acc;
    }
    case NodeKind::product: {
      TruncatedSeries acc = evaluate(e.children()[0], env);
      for (std::size_t i = 1; i < e.children().size(); ++i) acc = acc * evaluate(e.children()[i], env);
      return acc;
    }
    case NodeKind::quotient: {
      TruncatedSeries den = evaluate(e.children()[1], env);
      if (sgn(den.constant_term()) == 0) {
        throw Error(ErrorCode::division_by_zero,
                    "zero constant term in denominator " + to_string(e.children()[1]));
      }
      return evaluate(e.children()[0], env) * unary_analytic(AnalyticKind::reciprocal, den);
    }
    case NodeKind::power:
      return power(evaluate(e.children()[0], env), e.exponent());
    case NodeKind::primitive:
      return unary_analytic(PrimitiveTable::instance().analytic_kind(e.fn()), evaluate(e.children()[0], env));
  }
  return TruncatedSeries(env.arity, env.order);
}

Rational evaluate_at(const Expression& e, const std::map<VarRef, Rational>& point) {
  switch (e.kind()) {
    case NodeKind::constant:
      return e.value();
    case NodeKind::variable: {
      auto it = point.find(e.var());
      if (it == point.end()) throw Error(ErrorCode::unbound_variable, "unbound variable " + to_string(e.var()));
      return it->second;
    }
    case NodeKind::sum: {
      Rational acc = 0;
      for (const auto& c : e.children()) acc += evaluate_at(c, point);
      return acc;
    }
    case NodeKind::product: {
      Rational acc = 1;
      for (const auto& c : e.children()) acc *= evaluate_at(c, point);
      return acc;
    }
    case NodeKind::quotient: {
      const Rational den = evaluate_at(e.children()[1], point);
      if (sgn(den) == 0) {
        throw Error(ErrorCode::division_by_zero, "denominator " + to_string(e.children()[1]) + " vanishes");
      }
      return evaluate_at(e.children()[0], point) / den;
    }
    case NodeKind::power: {
      const Rational b = evaluate_at(e.children()[0], point);
      Rational r = 1;
      for (int i = 0; i < e.exponent(); ++i) r *= b;
      return r;
    }
    case NodeKind::primitive: {
      const Rational arg = evaluate_at(e.children()[0], point);
      const auto& table = PrimitiveTable::instance();
      auto v = table.value_at(e.fn(), arg);
      if (!v) {
        throw Error(ErrorCode::inadmissible_primitive, std::string(primitive_name(e.fn())) + "(" + to_string(arg) +
                                                           ") has no exact rational value: " + table.guard(e.fn()));
      }
      return *v;
    }
  }
  return 0;
}

std::optional<RationalFunction> to_rational_function(const Expression& e, const Dims& dims) {
  const std::size_t nv = dims.var_count() + 1;
  switch (e.kind()) {
    case NodeKind::constant:
      return RationalFunction::constant(nv, e.value());
    case NodeKind::variable:
      return RationalFunction{Polynomial::variable(nv, flat_index(e.var(), dims)), Polynomial::constant(nv, 1)};
    case NodeKind::sum:
    case NodeKind::product: {
      const bool is_sum = e.kind() == NodeKind::sum;
      std::optional<RationalFunction> acc;
      for (const auto& c : e.children()) {
        auto f = to_rational_function(c, dims);
        if (!f) return std::nullopt;
        if (!acc) {
          acc = std::move(f);
        } else {
          acc = is_sum ? *acc + *f : *acc * *f;
        }
      }
      return acc;
    }
    case NodeKind::quotient: {
      auto n = to_rational_function(e.children()[0], dims);
      auto d = to_rational_function(e.children()[1], dims);
      if (!n || !d) return std::nullopt;
      if (d->is_zero()) throw Error(ErrorCode::division_by_zero, "denominator " + to_string(e.children()[1]) + " is identically zero");
      return *n / *d;
    }
    case NodeKind::power: {
      auto b = to_rational_function(e.children()[0], dims);
      if (!b) return std::nullopt;
      return power(*b, e.exponent());
    }
    case NodeKind::primitive:
      return std::nullopt;
  }
  return std::nullopt;
}

const PrimitiveTable& PrimitiveTable::instance() {
  static const PrimitiveTable table;
  return table;
}

std::optional<Primitive> PrimitiveTable::lookup(std::string_view name) const {
  for (Primitive p : {Primitive::exp, Primitive::log, Primitive::sin, Primitive::cos, Primitive::sqrt}) {
    if (name == primitive_name(p)) return p;
  }
  return std::nullopt;
}

Expression PrimitiveTable::derivative(Primitive fn, const Expression& arg) const {
  switch (fn) {
    case Primitive::exp: return Expression::apply(Primitive::exp, arg);
    case Primitive::log: return make_quotient(Expression::constant(1), arg);
    case Primitive::sin: return Expression::apply(Primitive::cos, arg);
    case Primitive::cos: return negate(Expression::apply(Primitive::sin, arg));
    case Primitive::sqrt:
      return make_quotient(Expression::constant(1),
                           make_product(Expression::constant(2), Expression::apply(Primitive::sqrt, arg)));
  }
  return Expression::constant(0);
}

std::optional<Rational> PrimitiveTable::value_at(Primitive fn, const Rational& arg) const {
  switch (fn) {
    case Primitive::exp: return sgn(arg) == 0 ? std::optional<Rational>(1) : std::nullopt;
    case Primitive::log: return arg == 1 ? std::optional<Rational>(0) : std::nullopt;
    case Primitive::sin: return sgn(arg) == 0 ? std::optional<Rational>(0) : std::nullopt;
    case Primitive::cos: return sgn(arg) == 0 ? std::optional<Rational>(1) : std::nullopt;
    case Primitive::sqrt: return sgn(arg) > 0 ? exact_sqrt(arg) : std::nullopt;
  }
  return std::nullopt;
}

std::vector<Rational> PrimitiveTable::taylor(Primitive fn, const Rational& base, int count) const {
  if (!value_at(fn, base)) {
    throw Error(ErrorCode::inadmissible_primitive,
                std::string(primitive_name(fn)) + " at " + to_string(base) + ": " + guard(fn));
  }
  std::vector<Rational> c(static_cast<std::size_t>(std::max(count, 0)));
  for (int j = 0; j < count; ++j) {
    Rational v = 0;
    switch (fn) {
      case Primitive::exp:
        v = 1 / factorial(j);
        break;
      case Primitive::log:
        if (j > 0) v = Rational(j % 2 == 1 ? 1 : -1, j);
        break;
      case Primitive::sin:
        if (j % 2 == 1) v = Rational((j / 2) % 2 == 0 ? 1 : -1) / factorial(j);
        break;
      case Primitive::cos:
        if (j % 2 == 0) v = Rational((j / 2) % 2 == 0 ? 1 : -1) / factorial(j);
        break;
      case Primitive::sqrt: {
        const Rational r = *exact_sqrt(base);
        Rational bj = 1;
        for (int i = 0; i < j; ++i) bj *= base;
        v = r * binomial(Rational(1, 2), j) / bj;
        break;
      }
    }
    v.canonicalize();
    c[static_cast<std::size_t>(j)] = v;
  }
  return c;
}

const char* PrimitiveTable::guard(Primitive fn) const {
  switch (fn) {
    case Primitive::exp: return "argument must be 0 at the base point";
    case Primitive::log: return "argument must be 1 at the base point";
    case Primitive::sin: return "argument must be 0 at the base point";
    case Primitive::cos: return "argument must be 0 at the base point";
    case Primitive::sqrt: return "argument must be the square of a positive rational at the base point";
  }
  return "";
}

AnalyticKind PrimitiveTable::analytic_kind(Primitive fn) const {
  switch (fn) {
    case Primitive::exp: return AnalyticKind::exp;
    case Primitive::log: return AnalyticKind::log;
    case Primitive::sin: return AnalyticKind::sin;
    case Primitive::cos: return AnalyticKind::cos;
    case Primitive::sqrt: return AnalyticKind::sqrt;
  }
  return AnalyticKind::exp;
}

}  // namespace ck
