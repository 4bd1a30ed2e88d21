#include "ck/polynomial.hpp"

#include <algorithm>

#include "ck/error.hpp"

namespace ck {

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(MultiIndex(nvars), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t var) {
  Polynomial p(nvars);
  p.add_term(MultiIndex::unit(nvars, var), 1);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0);
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(MultiIndex(nvars_));
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const MultiIndex& e, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Rational Polynomial::evaluate(const std::vector<Rational>& point) const {
  if (point.size() != nvars_) throw Error(ErrorCode::arity_mismatch, "polynomial evaluation point size");
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    }
    acc += t;
  }
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  for (const auto& [e, c] : b.terms_) out.add_term(e, c);
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  for (const auto& [e, c] : b.terms_) out.add_term(e, -c);
  return out;
}

Polynomial operator-(const Polynomial& a) {
  Polynomial out(a.nvars_);
  for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, -c);
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, ca * cb);
  }
  return out;
}

Polynomial power(const Polynomial& p, int exponent) {
  Polynomial result = Polynomial::constant(p.nvars(), 1);
  for (int i = 0; i < exponent; ++i) result = result * p;
  return result;
}

RationalFunction RationalFunction::constant(std::size_t nvars, const Rational& c) {
  return {Polynomial::constant(nvars, c), Polynomial::constant(nvars, 1)};
}

namespace {

bool is_monomial(const Polynomial& p) { return p.terms().size() == 1; }

Polynomial shift_monomial(const Polynomial& p, const std::vector<int>& delta, const Rational& scale) {
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> exps = e.exponents();
    for (std::size_t i = 0; i < exps.size(); ++i) exps[i] += delta[i];
    out.add_term(MultiIndex(std::move(exps)), c * scale);
  }
  return out;
}

// Monomial denominators are made monic and share no variable with every numerator term.
RationalFunction normalized(RationalFunction f) {
  const std::size_t nv = f.num.nvars();
  if (f.num.is_zero()) return RationalFunction::constant(nv, 0);
  if (!is_monomial(f.den)) return f;
  const auto& [dexp, dcoef] = *f.den.terms().begin();
  std::vector<int> common = dexp.exponents();
  for (const auto& [e, c] : f.num.terms()) {
    for (std::size_t i = 0; i < nv; ++i) common[i] = std::min(common[i], e[i]);
  }
  std::vector<int> neg(nv);
  for (std::size_t i = 0; i < nv; ++i) neg[i] = -common[i];
  const Rational inv = 1 / dcoef;
  Polynomial num = shift_monomial(f.num, neg, inv);
  Polynomial den(nv);
  std::vector<int> dreduced = dexp.exponents();
  for (std::size_t i = 0; i < nv; ++i) dreduced[i] -= common[i];
  den.add_term(MultiIndex(std::move(dreduced)), 1);
  return {std::move(num), std::move(den)};
}

RationalFunction add_or_subtract(const RationalFunction& a, const RationalFunction& b, bool subtract) {
  auto combine_num = [subtract](const Polynomial& x, const Polynomial& y) {
    return subtract ? x - y : x + y;
  };
  if (a.den == b.den) return normalized({combine_num(a.num, b.num), a.den});
  if (is_monomial(a.den) && is_monomial(b.den)) {
    const auto& [ea, ca] = *a.den.terms().begin();
    const auto& [eb, cb] = *b.den.terms().begin();
    const std::size_t nv = a.num.nvars();
    std::vector<int> lcm(nv), da(nv), db(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      lcm[i] = std::max(ea[i], eb[i]);
      da[i] = lcm[i] - ea[i];
      db[i] = lcm[i] - eb[i];
    }
    Polynomial den(nv);
    den.add_term(MultiIndex(lcm), 1);
    return normalized({combine_num(shift_monomial(a.num, da, 1 / ca), shift_monomial(b.num, db, 1 / cb)), den});
  }
  return normalized({combine_num(a.num * b.den, b.num * a.den), a.den * b.den});
}

}  // namespace

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return add_or_subtract(a, b, false);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return add_or_subtract(a, b, true);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.num.is_zero() || b.num.is_zero()) return RationalFunction::constant(a.num.nvars(), 0);
  return normalized({a.num * b.num, a.den * b.den});
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.num.is_zero()) throw Error(ErrorCode::division_by_zero, "division by the zero rational function");
  if (a.num.is_zero()) return RationalFunction::constant(a.num.nvars(), 0);
  return normalized({a.num * b.den, a.den * b.num});
}

RationalFunction power(const RationalFunction& f, int exponent) {
  return normalized({power(f.num, exponent), power(f.den, exponent)});
}

}  // namespace ck
