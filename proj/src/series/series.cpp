#include "ck/series.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ck/error.hpp"

namespace ck {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw Error(ErrorCode::invalid_argument, "negative exponent in multi-index");
  }
  degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

MultiIndex MultiIndex::unit(std::size_t arity, std::size_t var, int power) {
  std::vector<int> e(arity, 0);
  e.at(var) = power;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::shifted(std::size_t var, int delta) const {
  MultiIndex out = *this;
  out.exps_.at(var) += delta;
  if (out.exps_[var] < 0) throw Error(ErrorCode::invalid_argument, "negative exponent in multi-index");
  out.degree_ += delta;
  return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  MultiIndex out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ += other.degree_;
  return out;
}

bool MultiIndex::divides(const MultiIndex& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] > other.exps_[i]) return false;
  }
  return true;
}

const char* analytic_name(AnalyticKind kind) {
  switch (kind) {
    case AnalyticKind::reciprocal: return "reciprocal";
    case AnalyticKind::sqrt: return "sqrt";
    case AnalyticKind::exp: return "exp";
    case AnalyticKind::log: return "log";
    case AnalyticKind::sin: return "sin";
    case AnalyticKind::cos: return "cos";
  }
  return "?";
}

TruncatedSeries::TruncatedSeries(std::size_t arity, int order) : arity_(arity), order_(order) {
  if (order < 0) throw Error(ErrorCode::invalid_argument, "negative truncation order");
}

TruncatedSeries TruncatedSeries::constant(std::size_t arity, int order, const Rational& value) {
  TruncatedSeries s(arity, order);
  s.set_coefficient(MultiIndex(arity), value);
  return s;
}

TruncatedSeries TruncatedSeries::variable(std::size_t arity, int order, std::size_t var,
                                          const Rational& shift) {
  if (var >= arity) throw Error(ErrorCode::invalid_argument, "variable index out of range");
  TruncatedSeries s = constant(arity, order, shift);
  s.set_coefficient(MultiIndex::unit(arity, var), 1);
  return s;
}

TruncatedSeries TruncatedSeries::monomial(int order, const MultiIndex& exps, const Rational& coeff) {
  TruncatedSeries s(exps.arity(), order);
  s.set_coefficient(exps, coeff);
  return s;
}

Rational TruncatedSeries::coefficient(const MultiIndex& exps) const {
  auto it = terms_.find(exps);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational TruncatedSeries::constant_term() const { return coefficient(MultiIndex(arity_)); }

void TruncatedSeries::set_coefficient(const MultiIndex& exps, const Rational& value) {
  if (exps.arity() != arity_) throw Error(ErrorCode::arity_mismatch, "multi-index arity mismatch");
  if (exps.degree() > order_) return;
  if (sgn(value) == 0) {
    terms_.erase(exps);
  } else {
    terms_[exps] = value;
  }
}

void TruncatedSeries::add_to_coefficient(const MultiIndex& exps, const Rational& value) {
  if (exps.arity() != arity_) throw Error(ErrorCode::arity_mismatch, "multi-index arity mismatch");
  if (exps.degree() > order_ || sgn(value) == 0) return;
  auto [it, inserted] = terms_.try_emplace(exps, value);
  if (!inserted) {
    it->second += value;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

int TruncatedSeries::lowest_degree() const {
  return terms_.empty() ? -1 : terms_.begin()->first.degree();
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
  TruncatedSeries out(arity_, std::min(order, order_));
  for (const auto& [e, c] : terms_) {
    if (e.degree() > out.order_) break;
    out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

TruncatedSeries TruncatedSeries::homogeneous_part(int degree) const {
  TruncatedSeries out(arity_, order_);
  for (const auto& [e, c] : terms_) {
    if (e.degree() == degree) out.terms_.emplace_hint(out.terms_.end(), e, c);
    if (e.degree() > degree) break;
  }
  return out;
}

Rational TruncatedSeries::derivative_at_origin(const MultiIndex& exps) const {
  Rational c = coefficient(exps);
  for (int e : exps.exponents()) c *= factorial(e);
  return c;
}

namespace {

void require_same_arity(const TruncatedSeries& s, const TruncatedSeries& t) {
  if (s.arity() != t.arity()) {
    throw Error(ErrorCode::arity_mismatch, "series arity mismatch: " + std::to_string(s.arity()) +
                                               " vs " + std::to_string(t.arity()));
  }
}

TruncatedSeries multiply(const TruncatedSeries& s, const TruncatedSeries& t) {
  require_same_arity(s, t);
  const int order = std::min(s.order(), t.order());
  TruncatedSeries out(s.arity(), order);
  if (s.is_zero() || t.is_zero()) return out;
  std::map<MultiIndex, Rational, GradedOrder> acc;
  Rational prod;
  for (const auto& [ea, ca] : s.terms()) {
    if (ea.degree() > order) break;
    const int budget = order - ea.degree();
    for (const auto& [eb, cb] : t.terms()) {
      if (eb.degree() > budget) break;
      mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
      auto [it, inserted] = acc.try_emplace(ea + eb, prod);
      if (!inserted) it->second += prod;
    }
  }
  for (auto& [e, c] : acc) {
    if (sgn(c) != 0) out.set_coefficient(e, c);
  }
  return out;
}

}  // namespace

TruncatedSeries combine(SeriesOp kind, const TruncatedSeries& s, const TruncatedSeries& t) {
  if (kind == SeriesOp::mul) return multiply(s, t);
  require_same_arity(s, t);
  TruncatedSeries out = s.truncated(std::min(s.order(), t.order()));
  for (const auto& [e, c] : t.terms()) {
    if (e.degree() > out.order()) break;
    out.add_to_coefficient(e, kind == SeriesOp::add ? c : Rational(-c));
  }
  return out;
}

TruncatedSeries operator+(const TruncatedSeries& s, const TruncatedSeries& t) {
  return combine(SeriesOp::add, s, t);
}
TruncatedSeries operator-(const TruncatedSeries& s, const TruncatedSeries& t) {
  return combine(SeriesOp::sub, s, t);
}
TruncatedSeries operator*(const TruncatedSeries& s, const TruncatedSeries& t) {
  return combine(SeriesOp::mul, s, t);
}

TruncatedSeries operator-(const TruncatedSeries& s) {
  TruncatedSeries out(s.arity(), s.order());
  for (const auto& [e, c] : s.terms()) out.set_coefficient(e, -c);
  return out;
}

TruncatedSeries operator*(const Rational& k, const TruncatedSeries& s) {
  TruncatedSeries out(s.arity(), s.order());
  if (sgn(k) == 0) return out;
  for (const auto& [e, c] : s.terms()) out.set_coefficient(e, k * c);
  return out;
}

TruncatedSeries power(const TruncatedSeries& s, int exponent) {
  if (exponent < 0) throw Error(ErrorCode::invalid_argument, "negative series power");
  TruncatedSeries result = TruncatedSeries::constant(s.arity(), s.order(), 1);
  TruncatedSeries base = s;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

namespace {

std::vector<TruncatedSeries> homogeneous_parts(const TruncatedSeries& s) {
  std::vector<TruncatedSeries> parts(s.order() + 1, TruncatedSeries(s.arity(), s.order()));
  for (const auto& [e, c] : s.terms()) parts[e.degree()].set_coefficient(e, c);
  return parts;
}

TruncatedSeries assemble(const std::vector<TruncatedSeries>& parts, std::size_t arity, int order) {
  TruncatedSeries out(arity, order);
  for (const auto& p : parts) {
    for (const auto& [e, c] : p.terms()) out.set_coefficient(e, c);
  }
  return out;
}

[[noreturn]] void inadmissible(AnalyticKind kind, const Rational& c, const std::string& guard) {
  throw Error(kind == AnalyticKind::reciprocal ? ErrorCode::division_by_zero
                                               : ErrorCode::inadmissible_primitive,
              std::string(analytic_name(kind)) + ": constant term " + to_string(c) + " " + guard);
}

}  // namespace

TruncatedSeries unary_analytic(AnalyticKind kind, const TruncatedSeries& s) {
  const std::size_t n = s.arity();
  const int order = s.order();
  const Rational c0 = s.constant_term();
  const auto P = homogeneous_parts(s);
  std::vector<TruncatedSeries> R(order + 1, TruncatedSeries(n, order));
  const MultiIndex origin(n);

  switch (kind) {
    case AnalyticKind::reciprocal: {
      if (sgn(c0) == 0) inadmissible(kind, c0, "is zero");
      const Rational inv = 1 / c0;
      R[0].set_coefficient(origin, inv);
      for (int d = 1; d <= order; ++d) {
        TruncatedSeries acc(n, order);
        for (int j = 1; j <= d; ++j) acc = acc + P[j] * R[d - j];
        R[d] = Rational(-inv) * acc;
      }
      break;
    }
    case AnalyticKind::sqrt: {
      if (sgn(c0) <= 0) inadmissible(kind, c0, "is not positive");
      const auto root = exact_sqrt(c0);
      if (!root) inadmissible(kind, c0, "is not the square of a rational");
      R[0].set_coefficient(origin, *root);
      const Rational half_inv = 1 / (2 * *root);
      for (int d = 1; d <= order; ++d) {
        TruncatedSeries acc = P[d];
        for (int j = 1; j < d; ++j) acc = acc - R[j] * R[d - j];
        R[d] = half_inv * acc;
      }
      break;
    }
    case AnalyticKind::exp: {
      if (sgn(c0) != 0) inadmissible(kind, c0, "is not 0 (exact coefficients need exp(c) rational)");
      R[0].set_coefficient(origin, 1);
      for (int d = 1; d <= order; ++d) {
        TruncatedSeries acc(n, order);
        for (int j = 1; j <= d; ++j) acc = acc + Rational(j) * (P[j] * R[d - j]);
        R[d] = Rational(1, d) * acc;
      }
      break;
    }
    case AnalyticKind::log: {
      if (sgn(c0) <= 0) inadmissible(kind, c0, "is not positive");
      if (c0 != 1) inadmissible(kind, c0, "is not 1 (exact coefficients need log(c) rational)");
      for (int d = 1; d <= order; ++d) {
        TruncatedSeries acc = Rational(d) * P[d];
        for (int j = 1; j < d; ++j) acc = acc - Rational(j) * (R[j] * P[d - j]);
        R[d] = Rational(1, d) * acc;
      }
      break;
    }
    case AnalyticKind::sin:
    case AnalyticKind::cos: {
      if (sgn(c0) != 0) inadmissible(kind, c0, "is not 0 (exact coefficients need rational values)");
      std::vector<TruncatedSeries> S(order + 1, TruncatedSeries(n, order));
      std::vector<TruncatedSeries> C(order + 1, TruncatedSeries(n, order));
      C[0].set_coefficient(origin, 1);
      for (int d = 1; d <= order; ++d) {
        TruncatedSeries sa(n, order), ca(n, order);
        for (int j = 1; j <= d; ++j) {
          sa = sa + Rational(j) * (P[j] * C[d - j]);
          ca = ca - Rational(j) * (P[j] * S[d - j]);
        }
        S[d] = Rational(1, d) * sa;
        C[d] = Rational(1, d) * ca;
      }
      R = kind == AnalyticKind::sin ? std::move(S) : std::move(C);
      break;
    }
  }
  return assemble(R, n, order);
}

TruncatedSeries calculus(CalculusKind kind, const TruncatedSeries& s, std::size_t var) {
  if (var >= s.arity()) {
    throw Error(ErrorCode::invalid_argument, "variable index " + std::to_string(var) +
                                                 " out of range for arity " + std::to_string(s.arity()));
  }
  if (kind == CalculusKind::derivative) {
    TruncatedSeries out(s.arity(), std::max(s.order() - 1, 0));
    for (const auto& [e, c] : s.terms()) {
      if (e[var] == 0) continue;
      out.set_coefficient(e.shifted(var, -1), c * e[var]);
    }
    return out;
  }
  TruncatedSeries out(s.arity(), s.order() + 1);
  for (const auto& [e, c] : s.terms()) {
    out.set_coefficient(e.shifted(var, 1), c / (e[var] + 1));
  }
  return out;
}

TruncatedSeries derivative(const TruncatedSeries& s, std::size_t var) {
  return calculus(CalculusKind::derivative, s, var);
}

TruncatedSeries antiderivative(const TruncatedSeries& s, std::size_t var) {
  return calculus(CalculusKind::antiderivative, s, var);
}

TruncatedSeries compose_univariate(std::span<const Rational> taylor, const TruncatedSeries& s) {
  TruncatedSeries h = s;
  h.set_coefficient(MultiIndex(s.arity()), 0);
  const int last = std::min<int>(static_cast<int>(taylor.size()) - 1, s.order());
  TruncatedSeries acc(s.arity(), s.order());
  for (int k = last; k >= 0; --k) {
    acc = acc * h;
    acc.add_to_coefficient(MultiIndex(s.arity()), taylor[k]);
  }
  return acc;
}

TruncatedSeries linear_substitute(const TruncatedSeries& s,
                                  const std::vector<std::vector<Rational>>& rows,
                                  std::size_t new_arity) {
  if (rows.size() != s.arity()) throw Error(ErrorCode::arity_mismatch, "substitution row count");
  const int order = s.order();
  std::vector<std::vector<TruncatedSeries>> powers(s.arity());
  for (std::size_t i = 0; i < s.arity(); ++i) {
    if (rows[i].size() != new_arity) throw Error(ErrorCode::arity_mismatch, "substitution row width");
    TruncatedSeries form(new_arity, order);
    for (std::size_t j = 0; j < new_arity; ++j) form.set_coefficient(MultiIndex::unit(new_arity, j), rows[i][j]);
    powers[i].push_back(TruncatedSeries::constant(new_arity, order, 1));
    powers[i].push_back(form);
  }
  TruncatedSeries out(new_arity, order);
  for (const auto& [e, c] : s.terms()) {
    TruncatedSeries term = TruncatedSeries::constant(new_arity, order, c);
    for (std::size_t i = 0; i < s.arity(); ++i) {
      while (static_cast<int>(powers[i].size()) <= e[i]) {
        powers[i].push_back(powers[i].back() * powers[i][1]);
      }
      if (e[i] > 0) term = term * powers[i][e[i]];
    }
    out = out + term;
  }
  return out;
}

TruncatedSeries embed(const TruncatedSeries& s, std::size_t new_arity,
                      std::span<const std::size_t> var_map) {
  if (var_map.size() != s.arity()) throw Error(ErrorCode::arity_mismatch, "embedding map size");
  TruncatedSeries out(new_arity, s.order());
  for (const auto& [e, c] : s.terms()) {
    std::vector<int> ne(new_arity, 0);
    for (std::size_t i = 0; i < s.arity(); ++i) ne.at(var_map[i]) += e[i];
    out.set_coefficient(MultiIndex(std::move(ne)), c);
  }
  return out;
}

TruncatedSeries restrict_to_zero(const TruncatedSeries& s, std::span<const std::size_t> vars) {
  std::vector<bool> drop(s.arity(), false);
  for (auto v : vars) drop.at(v) = true;
  const std::size_t kept = s.arity() - static_cast<std::size_t>(std::count(drop.begin(), drop.end(), true));
  TruncatedSeries out(kept, s.order());
  for (const auto& [e, c] : s.terms()) {
    bool vanishes = false;
    std::vector<int> ne;
    ne.reserve(kept);
    for (std::size_t i = 0; i < s.arity(); ++i) {
      if (drop[i]) {
        if (e[i] > 0) vanishes = true;
      } else {
        ne.push_back(e[i]);
      }
    }
    if (!vanishes) out.set_coefficient(MultiIndex(std::move(ne)), c);
  }
  return out;
}

bool agree_to_order(const TruncatedSeries& s, const TruncatedSeries& t, int order) {
  if (s.arity() != t.arity()) return false;
  auto a = s.truncated(order);
  auto b = t.truncated(order);
  return a.terms() == b.terms();
}

std::string to_string(const TruncatedSeries& s, const std::string& var_prefix) {
  if (s.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : s.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit = mag == 1 && e.degree() > 0;
    if (!unit) os << to_string(mag);
    bool need_star = !unit;
    for (std::size_t i = 0; i < e.arity(); ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << var_prefix << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace ck
