#include "ck/mongeampere.hpp"

#include <sstream>

#include "ck/error.hpp"

namespace ck {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Dims rhs_dims(int n) { return Dims{n, 1, n}; }

const int kGermOrder = 8;

// Zero test for an expression in x and t: rational-function identity when possible,
// otherwise a germ at (x0, t = 1).
class ZeroTest {
 public:
  explicit ZeroTest(const MongeRhs& rhs) : rhs_(rhs) {}

  bool operator()(const Expression& e) {
    if (e.is_constant()) return e.is_constant(0);
    if (auto f = to_rational_function(e, rhs_dims(rhs_.n))) return f->is_zero();
    used_germ_ = true;
    const std::size_t arity = sz(rhs_.n + 1);
    SeriesEnv env{arity, kGermOrder, {}};
    for (int i = 0; i < rhs_.n; ++i) {
      env.bindings[VarRef::x(i + 1)] = TruncatedSeries::variable(arity, kGermOrder, sz(i), rhs_.x0[sz(i)]);
    }
    env.bindings[VarRef::t()] = TruncatedSeries::variable(arity, kGermOrder, sz(rhs_.n), 1);
    return evaluate(e, env).is_zero();
  }

  bool used_germ() const { return used_germ_; }

 private:
  const MongeRhs& rhs_;
  bool used_germ_ = false;
};

std::string first_term(const TruncatedSeries& s) {
  const auto& [e, c] = *s.terms().begin();
  std::ostringstream out;
  out << "coefficient of y^(";
  for (std::size_t i = 0; i < e.arity(); ++i) out << (i ? "," : "") << e[i];
  out << ") is " << c.get_str();
  return out.str();
}

void require_agree(const TruncatedSeries& s, const TruncatedSeries& t, int order, const std::string& what) {
  const auto diff = s.truncated(order) - t.truncated(order);
  if (!diff.is_zero()) throw Error(ErrorCode::residual, what + " fails: " + first_term(diff));
}

TruncatedSeries second(const TruncatedSeries& u, int i, int j) {
  return derivative(derivative(u, sz(i)), sz(j));
}

// Series of an x-only or (x, t) expression at x0 with t bound to `t`.
TruncatedSeries rhs_series(const Expression& e, const std::vector<Rational>& x0, std::size_t arity, int order,
                           const std::optional<TruncatedSeries>& t) {
  SeriesEnv env{arity, order, {}};
  for (std::size_t i = 0; i < x0.size(); ++i) env.bindings[VarRef::x(static_cast<int>(i) + 1)] = TruncatedSeries::variable(arity, order, i, x0[i]);
  if (t) env.bindings[VarRef::t()] = t->truncated(order);
  return evaluate(e, env);
}

}  // namespace

MongeRhs MongeRhs::zero(int n) {
  MongeRhs rhs;
  rhs.n = n;
  rhs.x0.assign(sz(n), Rational(0));
  rhs.f.assign(sz(n - 1), std::vector<Expression>(sz(n - 1), Expression::constant(0)));
  return rhs;
}

void MongeRhs::validate() const {
  if (n < 2) throw Error(ErrorCode::input, "Monge-Ampere systems need n >= 2");
  if (x0.size() != sz(n)) throw Error(ErrorCode::input, "x0 must have n entries");
  bool shape = f.size() == sz(n - 1);
  for (const auto& row : f) shape = shape && row.size() == sz(n - 1);
  if (!shape) throw Error(ErrorCode::input, "f must be an (n-1) x (n-1) table");
  for (int a = 1; a < n; ++a) {
    for (int b = 1; b < n; ++b) {
      for (const auto& v : variables(at(a, b))) {
        if (v.kind != VarKind::x && v.kind != VarKind::t) {
          throw Error(ErrorCode::input, "f may only use x[i] and t, found " + to_string(v));
        }
        if (v.kind == VarKind::x && (v.a < 1 || v.a > n)) throw Error(ErrorCode::index_range, to_string(v) + " is out of range");
      }
      if (b > a && !(at(a, b) == at(b, a)) && !ZeroTest(*this)(make_difference(at(a, b), at(b, a)))) {
        throw Error(ErrorCode::invalid_argument, "f is not symmetric: f_" + std::to_string(a + 1) + "," +
                                                     std::to_string(b + 1) + " differs from f_" + std::to_string(b + 1) +
                                                     "," + std::to_string(a + 1));
      }
    }
  }
}

std::string MongeWitness::label() const {
  const std::string ab = std::to_string(alpha) + "," + std::to_string(beta);
  if (condition == "d1 g") return "d1 g_" + ab + " = " + expression;
  if (condition == "closedness") {
    return "d" + std::to_string(gamma) + " g_" + ab + " - d" + std::to_string(beta) + " g_" + std::to_string(alpha) +
           "," + std::to_string(gamma) + " = " + expression;
  }
  return "f_" + ab + " = " + expression;
}

std::string MongeReport::verdict() const {
  if (!conclusive) return "no conclusion for n = 2";
  if (admissible) return "admissible";
  if (!witnesses.empty() && witnesses.front().condition == "t-independent") return "inadmissible: t-independent nonzero f";
  if (!linear_in_t) return "inadmissible: f is not of the form g*t";
  return "inadmissible: g violates the closedness conditions";
}

TruncatedSeries delta_minor(const TruncatedSeries& u, int a, int b) {
  const int n = static_cast<int>(u.arity());
  if (a < 1 || a >= n || b < 1 || b >= n) throw Error(ErrorCode::index_range, "minor indices must be normal directions");
  if (u.order() < 2) throw Error(ErrorCode::invalid_argument, "delta_minor needs a series of order at least 2");
  return second(u, 0, 0) * second(u, a, b) - second(u, 0, b) * second(u, a, 0);
}

MongeReport classify_rhs(const MongeRhs& rhs, int potential_order) {
  rhs.validate();
  const int n = rhs.n;
  MongeReport rep;
  rep.n = n;
  rep.conclusive = n >= 3;
  ZeroTest zero(rhs);
  const auto t = Expression::variable(VarRef::t());
  const std::map<VarRef, Expression> t_one{{VarRef::t(), Expression::constant(1)}};

  std::vector<std::vector<Expression>> g(sz(n - 1), std::vector<Expression>(sz(n - 1)));
  rep.linear_in_t = true;
  for (int a = 1; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto& f = rhs.at(a, b);
      const auto ft = differentiate(f, VarRef::t());
      bool linear = zero(make_difference(f, make_product(t, ft))) && zero(differentiate(ft, VarRef::t()));
      if (!linear) {
        rep.linear_in_t = false;
        const bool t_free = !depends_on(f, VarRef::t());
        rep.witnesses.push_back({t_free ? "t-independent" : "t-form", a + 1, b + 1, 0, to_string(f)});
        continue;
      }
      g[sz(a - 1)][sz(b - 1)] = g[sz(b - 1)][sz(a - 1)] = substitute(ft, t_one);
    }
  }

  if (rep.linear_in_t) {
    auto G = [&](int a, int b) -> const Expression& { return g[sz(a - 1)][sz(b - 1)]; };
    for (int a = 1; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const auto d1 = differentiate(G(a, b), VarRef::x(1));
        if (!zero(d1)) rep.witnesses.push_back({"d1 g", a + 1, b + 1, 0, to_string(d1)});
      }
    }
    for (int a = 1; a < n; ++a) {
      for (int b = 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          const auto diff = make_difference(differentiate(G(a, b), VarRef::x(c + 1)), differentiate(G(a, c), VarRef::x(b + 1)));
          if (!zero(diff)) rep.witnesses.push_back({"closedness", a + 1, b + 1, c + 1, to_string(diff)});
        }
      }
    }
    rep.g = g;
  }
  rep.method = zero.used_germ() ? "germ-at-base-point" : "rational-identity";
  rep.admissible = rep.linear_in_t && rep.witnesses.empty();

  if (rep.admissible) {
    // v = sum_e Q_e / (e (e - 1)) with Q = y^a y^b g_ab(x0 + y): the potential with zero 1-jet at x0
    try {
      const std::size_t arity = sz(n);
      TruncatedSeries Q(arity, potential_order);
      for (int a = 1; a < n; ++a) {
        for (int b = 1; b < n; ++b) {
          const auto gs = rhs_series((*rep.g)[sz(a - 1)][sz(b - 1)], rhs.x0, arity, potential_order, std::nullopt);
          Q = Q + TruncatedSeries::variable(arity, potential_order, sz(a)) * TruncatedSeries::variable(arity, potential_order, sz(b)) * gs;
        }
      }
      TruncatedSeries v(arity, potential_order);
      for (const auto& [e, c] : Q.terms()) v.set_coefficient(e, c / Rational(e.degree() * (e.degree() - 1)));
      rep.potential = v;
    } catch (const Error&) {
      // g has no germ at x0 (a primitive outside its domain); the verdict stands without a potential
    }
  }
  return rep;
}

ReducedMonge reduce_to_first_order(const MongeRhs& rhs) {
  rhs.validate();
  const int n = rhs.n;
  ReducedMonge out;
  SystemSpec& sys = out.system;
  sys.dims = Dims{n, 1, n};
  sys.x0 = rhs.x0;
  sys.p0.assign(sz(n), Rational(0));
  sys.pprime0.assign(sz(n), std::vector<Rational>{Rational(0)});
  sys.pprime0[0][0] = 1;
  const auto u11 = Expression::variable(VarRef::pd(1, 1));
  auto u1 = [](int coord) { return Expression::variable(VarRef::pd(coord + 1, 1)); };
  const std::map<VarRef, Expression> t_to_u11{{VarRef::t(), u11}};

  sys.F.assign(sz(n), std::vector<Expression>(sz(n - 1)));
  for (int a = 1; a < n; ++a) {
    sys.F[0][sz(a - 1)] = u1(a);
    for (int b = 1; b < n; ++b) {
      const auto num = make_sum(make_product(u1(b), u1(a)), substitute(rhs.at(a, b), t_to_u11));
      sys.F[sz(b)][sz(a - 1)] = make_quotient(num, u11);
    }
  }
  sys.guards.push_back(u11);
  out.quadrature = "u_a = u^a for a >= 2, u(x^1, x0') = a(x^1)";
  return out;
}

MongeSolution solve_full(const MongeRhs& rhs, const MongeData& data, int order) {
  rhs.validate();
  const int n = rhs.n;
  const int N = order;
  if (N < 2) throw Error(ErrorCode::invalid_argument, "order must be at least 2");
  if (data.a.arity() != 1 || data.a_n.size() != sz(n - 1)) {
    throw Error(ErrorCode::input, "Monge data needs a and a_2..a_n as univariate series");
  }
  if (data.a.order() < N) throw Error(ErrorCode::input, "data a must be known to order N");
  for (const auto& s : data.a_n) {
    if (s.arity() != 1 || s.order() < N - 1) throw Error(ErrorCode::input, "data a_a must be univariate and known to order N - 1");
  }
  const Rational a2 = Rational(2) * data.a.coefficient(MultiIndex{2});
  if (sgn(a2) == 0) throw Error(ErrorCode::guard_violation, "a''(x0) = 0");
  if (n >= 3) {
    const auto rep = classify_rhs(rhs, N);
    if (!rep.admissible) {
      std::string what = "right-hand side is " + rep.verdict();
      if (!rep.witnesses.empty()) what += "; witness " + rep.witnesses.front().label();
      throw Error(ErrorCode::incompatible, what);
    }
  }

  MongeSolution out;
  out.reduced = reduce_to_first_order(rhs).system;
  SystemSpec& sys = out.reduced;
  CauchyData cd;
  cd.a.push_back(derivative(data.a, 0).truncated(N - 1));
  for (const auto& s : data.a_n) cd.a.push_back(s.truncated(N - 1));
  for (int i = 0; i < n; ++i) {
    sys.p0[sz(i)] = cd.a[sz(i)].constant_term();
    sys.pprime0[sz(i)][0] = cd.a[sz(i)].coefficient(MultiIndex{1});
  }
  out.gradient = solve(sys, cd, N - 1).u;
  const auto& grad = out.gradient;

  for (int a = 1; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      require_agree(derivative(grad[sz(a)], sz(b)), derivative(grad[sz(b)], sz(a)), N - 2,
                    "symmetry u^" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    }
  }

  // u from a along the x^1 axis, and from u_a = u^a off it
  const std::size_t arity = sz(n);
  const std::size_t axis[] = {0};
  TruncatedSeries u = embed(data.a, arity, axis).truncated(N);
  for (int a = 1; a < n; ++a) {
    for (const auto& [e, c] : grad[sz(a)].terms()) {
      bool lowest = true;
      for (int b = 1; b < a; ++b) lowest = lowest && e[sz(b)] == 0;
      if (!lowest) continue;
      const MultiIndex I = e.shifted(sz(a), 1);
      u.set_coefficient(I, c / Rational(I[sz(a)]));
    }
  }

  for (int i = 0; i < n; ++i) require_agree(derivative(u, sz(i)), grad[sz(i)], N - 1, "u_" + std::to_string(i + 1) + " = u^" + std::to_string(i + 1));
  for (int a = 1; a < n; ++a) {
    for (int b = 1; b < n; ++b) require_agree(second(u, a, b), derivative(grad[sz(a)], sz(b)), N - 2, "u_ab = u^a_b");
    require_agree(second(u, 0, a), derivative(grad[sz(a)], 0), N - 2, "u_1b = u^b_1");
    require_agree(second(u, a, 0), derivative(grad[0], sz(a)), N - 2, "u_a1 = u^1_a");
  }
  require_agree(second(u, 0, 0), derivative(grad[0], 0), N - 2, "u_11 = u^1_1");

  const auto u11 = second(u, 0, 0);
  for (int a = 1; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto res = (delta_minor(u, a, b) - rhs_series(rhs.at(a, b), rhs.x0, arity, N - 2, u11)).truncated(N - 2);
      if (!res.is_zero()) {
        const auto& [e, c] = *res.terms().begin();
        throw ResidualError("Delta_" + std::to_string(a + 1) + "," + std::to_string(b + 1) + " residual: " + first_term(res), a, b, e, c);
      }
    }
  }
  out.u = u;
  return out;
}

RankProfile hessian_rank_profile(const TruncatedSeries& u) {
  const int n = static_cast<int>(u.arity());
  if (u.order() < 2) throw Error(ErrorCode::invalid_argument, "the Hessian needs a series of order at least 2");
  if (sgn(u.coefficient(MultiIndex::unit(sz(n), 0, 2))) == 0) {
    throw Error(ErrorCode::guard_violation, "u_11(0) = 0: the minor criterion does not apply");
  }
  RankProfile out;
  out.rank_one = true;
  for (int a = 1; a < n && out.rank_one; ++a) {
    for (int b = a; b < n; ++b) {
      const auto D = delta_minor(u, a, b);
      if (D.is_zero()) continue;
      out.rank_one = false;
      out.alpha = a;
      out.beta = b;
      out.monomial = D.terms().begin()->first;
      out.value = D.terms().begin()->second;
      break;
    }
  }
  return out;
}

}  // namespace ck
