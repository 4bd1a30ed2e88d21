#pragma once

#include <random>
#include <string>
#include <vector>

#include "ck/expr.hpp"
#include "ck/series.hpp"

namespace cktest {

using ck::Expression;
using ck::Rational;
using ck::TruncatedSeries;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }

  /// Small rational p/q with |p| <= num_max, 1 <= q <= den_max.
  Rational rational(int num_max = 5, int den_max = 4) {
    Rational r(uniform(-num_max, num_max), uniform(1, den_max));
    r.canonicalize();
    return r;
  }

  Rational nonzero_rational(int num_max = 5, int den_max = 4) {
    Rational r;
    do r = rational(num_max, den_max);
    while (sgn(r) == 0);
    return r;
  }

  TruncatedSeries series(std::size_t arity, int order, int terms, int max_degree = -1) {
    if (max_degree < 0) max_degree = order;
    TruncatedSeries s(arity, order);
    for (int t = 0; t < terms; ++t) {
      std::vector<int> e(arity, 0);
      int budget = uniform(0, max_degree);
      for (int j = 0; j < budget; ++j) e[static_cast<std::size_t>(uniform(0, static_cast<int>(arity) - 1))]++;
      s.add_to_coefficient(ck::MultiIndex(e), rational());
    }
    return s;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random raw AST over the given variables; the shapes cover every printer branch.
inline Expression random_expression(Rng& rng, const std::vector<ck::VarRef>& vars, int depth,
                                    bool with_primitives = true) {
  if (depth <= 0 || rng.coin(0.25)) {
    if (rng.coin(0.4) || vars.empty()) return Expression::constant(rng.rational(6, 5));
    return Expression::variable(vars[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(vars.size()) - 1))]);
  }
  auto sub = [&] { return random_expression(rng, vars, depth - 1, with_primitives); };
  switch (rng.uniform(0, with_primitives ? 6 : 5)) {
    case 0:
    case 1: {
      std::vector<Expression> ch;
      const int count = rng.uniform(2, 3);
      for (int i = 0; i < count; ++i) ch.push_back(sub());
      return Expression::sum(ch);
    }
    case 2: {
      std::vector<Expression> ch;
      const int count = rng.uniform(2, 3);
      for (int i = 0; i < count; ++i) ch.push_back(sub());
      if (rng.coin(0.3)) ch.front() = Expression::constant(-1);
      return Expression::product(ch);
    }
    case 3: {
      Expression den = sub();
      while (den.is_constant(0)) den = Expression::constant(rng.nonzero_rational());
      return Expression::quotient(sub(), den);
    }
    case 4:
      return Expression::power(sub(), rng.uniform(0, 3));
    case 5:
      return Expression::product({Expression::constant(-1), sub()});
    default: {
      static const ck::Primitive fns[] = {ck::Primitive::exp, ck::Primitive::log, ck::Primitive::sin,
                                          ck::Primitive::cos, ck::Primitive::sqrt};
      return Expression::apply(fns[rng.uniform(0, 4)], sub());
    }
  }
}

/// Random polynomial of total degree <= degree with at most `terms` monomials, built with folding constructors.
inline Expression random_polynomial(Rng& rng, const std::vector<ck::VarRef>& vars, int degree, int terms) {
  Expression acc = Expression::constant(0);
  for (int t = 0; t < terms; ++t) {
    Expression mono = Expression::constant(rng.nonzero_rational(3, 2));
    const int deg = rng.uniform(0, degree);
    for (int j = 0; j < deg && !vars.empty(); ++j) {
      mono = ck::make_product(mono, Expression::variable(vars[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(vars.size()) - 1))]));
    }
    acc = ck::make_sum(acc, mono);
  }
  return acc;
}

}  // namespace cktest
