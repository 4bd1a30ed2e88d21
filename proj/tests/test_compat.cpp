#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ck/compat.hpp"
#include "ck/error.hpp"
#include "support.hpp"

using namespace ck;

namespace {

Expression P(const std::string& s, const Dims& d) { return parse_expression(s, d); }

SystemSpec make_system(const Dims& d, const std::vector<std::vector<std::string>>& rows,
                       std::vector<Rational> x0 = {}, std::vector<Rational> p0 = {},
                       std::vector<std::vector<Rational>> pp0 = {}) {
  SystemSpec sys;
  sys.dims = d;
  sys.x0 = x0.empty() ? std::vector<Rational>(static_cast<std::size_t>(d.n)) : x0;
  sys.p0 = p0.empty() ? std::vector<Rational>(static_cast<std::size_t>(d.m)) : p0;
  sys.pprime0 = pp0.empty() ? std::vector<std::vector<Rational>>(static_cast<std::size_t>(d.m),
                                                                  std::vector<Rational>(static_cast<std::size_t>(d.k)))
                            : pp0;
  for (const auto& row : rows) {
    std::vector<Expression> r;
    for (const auto& s : row) r.push_back(P(s, d));
    sys.F.push_back(r);
  }
  return sys;
}

// The first-order Monge-Ampere system with right-hand side f_{ab} = g_{ab}(x) t written out by hand:
// u^1_a = u^a_1 and u^b_a = (u^b_1 u^a_1 + g_{ab} u^1_1) / u^1_1.
SystemSpec monge_by_hand(int n, const std::vector<std::vector<Expression>>& g, const std::vector<Rational>& pd1) {
  const Dims d{n, 1, n};
  SystemSpec sys;
  sys.dims = d;
  sys.x0.assign(static_cast<std::size_t>(n), Rational(0));
  sys.p0.assign(static_cast<std::size_t>(n), Rational(0));
  for (int A = 0; A < n; ++A) sys.pprime0.push_back({pd1[static_cast<std::size_t>(A)]});
  const auto pd = [](int A) { return Expression::variable(VarRef::pd(A, 1)); };
  std::vector<Expression> first;
  for (int a = 2; a <= n; ++a) first.push_back(pd(a));
  sys.F.push_back(first);
  for (int b = 2; b <= n; ++b) {
    std::vector<Expression> row;
    for (int a = 2; a <= n; ++a) {
      const auto num = make_sum(make_product(pd(b), pd(a)),
                                make_product(g[static_cast<std::size_t>(a - 2)][static_cast<std::size_t>(b - 2)], pd(1)));
      row.push_back(make_quotient(num, pd(1)));
    }
    sys.F.push_back(row);
  }
  sys.guards.push_back(pd(1));
  return sys;
}

// Phi^A_{ab} as the total derivative d/dx^b F^A_a along a quadratic jet whose tangential second
// derivatives vanish; built from series evaluation only.
std::vector<Rational> phi_by_total_derivative(const SystemSpec& sys, const SamplePoint& pt) {
  const auto& d = sys.dims;
  const std::size_t n = static_cast<std::size_t>(d.n);
  const int order = 3;
  const int r = d.normal_count();
  std::vector<std::vector<Rational>> fval(static_cast<std::size_t>(d.m));
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) fval[static_cast<std::size_t>(A)].push_back(evaluate_at(sys.rhs(A, a), pt.env()));
  }
  auto y = [&](int i) { return TruncatedSeries::variable(n, order, static_cast<std::size_t>(i)); };
  std::vector<TruncatedSeries> u;
  for (int A = 0; A < d.m; ++A) {
    TruncatedSeries s = TruncatedSeries::constant(n, order, pt.p[static_cast<std::size_t>(A)]);
    for (int L = 0; L < d.k; ++L) s = s + pt.pd[static_cast<std::size_t>(A)][static_cast<std::size_t>(L)] * y(L);
    for (int a = 0; a < r; ++a) s = s + fval[static_cast<std::size_t>(A)][static_cast<std::size_t>(a)] * y(d.k + a);
    u.push_back(s);
  }
  auto env_for = [&](const std::vector<TruncatedSeries>& uu) {
    SeriesEnv env{n, order, {}};
    for (int i = 0; i < d.n; ++i) env.bindings[VarRef::x(i + 1)] = TruncatedSeries::variable(n, order, static_cast<std::size_t>(i), pt.x[static_cast<std::size_t>(i)]);
    for (int A = 0; A < d.m; ++A) {
      env.bindings[VarRef::p(A + 1)] = uu[static_cast<std::size_t>(A)];
      for (int L = 0; L < d.k; ++L) {
        env.bindings[VarRef::pd(A + 1, L + 1)] = derivative(uu[static_cast<std::size_t>(A)], static_cast<std::size_t>(L));
      }
    }
    return env;
  };
  const auto env1 = env_for(u);
  auto u2 = u;
  for (int B = 0; B < d.m; ++B) {
    for (int b = 0; b < r; ++b) {
      const auto G = evaluate(sys.rhs(B, b), env1);
      for (int L = 0; L < d.k; ++L) {
        const Rational c = G.coefficient(MultiIndex::unit(n, static_cast<std::size_t>(L)));
        u2[static_cast<std::size_t>(B)] = u2[static_cast<std::size_t>(B)] + c * (y(L) * y(d.k + b));
      }
    }
  }
  const auto env2 = env_for(u2);
  std::vector<Rational> phi;
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      const auto G = evaluate(sys.rhs(A, a), env2);
      for (int b = 0; b < r; ++b) phi.push_back(G.coefficient(MultiIndex::unit(n, static_cast<std::size_t>(d.k + b))));
    }
  }
  return phi;
}

std::vector<VarRef> all_vars(const Dims& d) {
  std::vector<VarRef> v;
  for (std::size_t i = 0; i < d.var_count(); ++i) v.push_back(var_from_flat(i, d));
  return v;
}

SamplePoint random_point(cktest::Rng& rng, const Dims& d) {
  SamplePoint pt;
  for (int i = 0; i < d.n; ++i) pt.x.push_back(rng.rational());
  for (int A = 0; A < d.m; ++A) pt.p.push_back(rng.rational());
  for (int A = 0; A < d.m; ++A) {
    pt.pd.emplace_back();
    for (int L = 0; L < d.k; ++L) pt.pd.back().push_back(rng.rational());
  }
  return pt;
}

}  // namespace

TEST_CASE("zero system has vanishing tensors") {
  const Dims d{3, 1, 2};
  const auto sys = make_system(d, {{"0", "0"}, {"0", "0"}});
  const auto t = phi_psi(sys, sys.base_point());
  for (const auto& v : t.phi) CHECK(v == 0);
  for (const auto& v : t.psi) CHECK(v == 0);
  const auto rep = check_compatibility(sys);
  CHECK(rep.compatible());
  CHECK(rep.points.size() == 16);
}

TEST_CASE("commutator example: asymmetric Phi") {
  const Dims d{3, 1, 1};
  const auto sys = make_system(d, {{"-x[3]*pd[1][1]", "0"}}, {}, {}, {{1}});
  const auto t = phi_psi(sys, sys.base_point());
  CHECK(t.Phi(0, 0, 1) == -1);
  CHECK(t.Phi(0, 1, 0) == 0);

  const auto rep = check_compatibility(sys);
  CHECK(rep.verdict() == "violated");
  REQUIRE(!rep.witnesses.empty());
  CHECK(rep.witnesses.front().label() == "Phi^1_2,3");
  CHECK(rep.witnesses.front().difference == -1);
  REQUIRE(rep.symbolic);
  CHECK(rep.symbolic->method == "rational-identity");
  CHECK_FALSE(rep.symbolic->holds);
  REQUIRE(rep.symbolic->witnesses.size() == 1);
  CHECK(rep.symbolic->witnesses[0].symbolic == "-pd[1][1]");
}

TEST_CASE("commuting fields give a compatible system") {
  const Dims d{3, 1, 1};
  const auto sys = make_system(d, {{"-x[2]*pd[1][1]", "0"}});
  const auto rep = check_compatibility(sys);
  CHECK(rep.compatible_at_samples());
  REQUIRE(rep.symbolic);
  CHECK(rep.symbolic->holds);
  CHECK(rep.verdict() == "compatible-at-samples");
}

TEST_CASE("Phi matches the total-derivative oracle on random polynomial systems") {
  cktest::Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Dims d{rng.uniform(2, 4), 1, rng.uniform(1, 2)};
    Dims dd = d;
    if (d.n == 4 && rng.coin()) dd.k = 2;
    SystemSpec sys;
    sys.dims = dd;
    const auto vars = all_vars(dd);
    for (int A = 0; A < dd.m; ++A) {
      sys.F.emplace_back();
      for (int a = 0; a < dd.normal_count(); ++a) sys.F.back().push_back(cktest::random_polynomial(rng, vars, 2, 3));
    }
    const auto pt = random_point(rng, dd);
    sys.x0 = pt.x;
    sys.p0 = pt.p;
    sys.pprime0 = pt.pd;
    const auto t = phi_psi(sys, pt);
    CHECK(t.phi == phi_by_total_derivative(sys, pt));
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("Monge system: Psi example and closed forms") {
  const auto zero = Expression::constant(0);
  {
    const auto sys = monge_by_hand(3, {{zero, zero}, {zero, zero}}, {1, 2, 3});
    const auto t = phi_psi(sys, sys.base_point());
    // A=1, Gamma=Lambda=1, alpha=2, beta=3, C=1
    CHECK(t.Psi(0, 0, 0, 0, 1, 0) == -12);
  }

  cktest::Rng rng(5);
  const int n = 3;
  const Dims d{n, 1, n};
  std::vector<VarRef> xs;
  for (int i = 1; i <= n; ++i) xs.push_back(VarRef::x(i));
  int points = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<Expression>> g(2, std::vector<Expression>(2));
    for (int a = 0; a < 2; ++a) {
      for (int b = a; b < 2; ++b) g[a][b] = g[b][a] = cktest::random_polynomial(rng, xs, 2, 3);
    }
    auto sys = monge_by_hand(n, g, {1, 0, 0});
    const SystemCalculus calc(sys);
    for (int s = 0; s < 5; ++s) {
      auto pt = random_point(rng, d);
      if (sgn(pt.pd[0][0]) == 0) pt.pd[0][0] = 1;
      const auto t = phi_psi(calc, pt);
      const auto env = pt.env();
      auto pa = [&](int a) { return pt.pd[static_cast<std::size_t>(a)][0]; };  // a is 0-based unknown index
      const Rational p1 = pa(0);
      auto dg = [&](int a, int b, int i) { return evaluate_at(differentiate(g[a][b], VarRef::x(i + 1)), env); };
      auto delta = [](int i, int j) { return Rational(i == j ? 1 : 0); };
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const int al = a + 1, be = b + 1;  // unknown index of p^alpha_1, 0-based
          CHECK(t.Phi(0, a, b) == dg(a, b, 0));
          CHECK(t.Psi(0, 0, 0, a, b, 0) == -2 * pa(al) * pa(be) / (p1 * p1));
          for (int c = 0; c < 2; ++c) {
            const int ga = c + 1;
            CHECK(t.Phi(ga, a, b) == dg(c, a, b + 1) + (pa(ga) * dg(a, b, 0) + pa(al) * dg(c, b, 0)) / p1);
            CHECK(t.Psi(0, 0, 0, a, b, ga) == 2 * (delta(a, c) * pa(be) + delta(b, c) * pa(al)) / p1);
            CHECK(t.Psi(ga, 0, 0, a, b, 0) == -4 * pa(al) * pa(be) * pa(ga) / (p1 * p1 * p1));
            for (int l = 0; l < 2; ++l) {
              CHECK(t.Psi(ga, 0, 0, a, b, l + 1) ==
                    2 * (delta(a, l) * pa(ga) * pa(be) + delta(b, l) * pa(al) * pa(ga) + delta(c, l) * pa(be) * pa(al)) /
                        (p1 * p1));
            }
          }
        }
      }
      ++points;
    }
  }
  CHECK(points == 50);
}

TEST_CASE("Monge system with a Hessian right-hand side is compatible") {
  const Dims d{3, 1, 3};
  const auto zero = Expression::constant(0), one = Expression::constant(1);
  const auto sys = monge_by_hand(3, {{zero, one}, {one, zero}}, {1, 0, 0});
  const auto rep = check_compatibility(sys);
  CHECK(rep.compatible_at_samples());
  REQUIRE(rep.symbolic);
  CHECK(rep.symbolic->method == "rational-identity");
  CHECK(rep.symbolic->holds);

  // g_22 = x[3] is not a Hessian: d_3 g_22 != d_2 g_23
  const auto bad = monge_by_hand(3, {{P("x[3]", d), zero}, {zero, zero}}, {1, 0, 0});
  const auto rep2 = check_compatibility(bad);
  CHECK_FALSE(rep2.compatible_at_samples());
  CHECK_FALSE(rep2.symbolic->holds);
}

TEST_CASE("sampling rejects guard violations and records the seed") {
  const Dims d{2, 1, 1};
  auto sys = make_system(d, {{"1/pd[1][1]"}}, {}, {}, {{1}});
  sys.guards.push_back(P("pd[1][1]", d));
  CompatOptions opt;
  opt.seed = 42;
  opt.samples = 8;
  const auto rep = check_compatibility(sys, opt);
  CHECK(rep.seed == 42);
  CHECK(rep.points.size() == 8);
  for (const auto& pt : rep.points) CHECK(sgn(pt.pd[0][0]) != 0);
  const auto again = check_compatibility(sys, opt);
  REQUIRE(again.points.size() == rep.points.size());
  for (std::size_t i = 0; i < rep.points.size(); ++i) CHECK(again.points[i].pd == rep.points[i].pd);

  auto zero_base = make_system(d, {{"1/pd[1][1]"}});
  zero_base.guards.push_back(P("pd[1][1]", d));
  try {
    check_compatibility(zero_base);
    FAIL("expected a guard violation at the base point");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::guard_violation);
  }
  opt.samples = 0;
  CHECK_THROWS_AS(check_compatibility(sys, opt), Error);
}

TEST_CASE("systems with primitives use the germ verdict") {
  const Dims d{3, 1, 1};
  // u_2 = exp(x[2]) u_1 and u_3 = 0: fields d_2 - exp(x2) d_1 and d_3 commute
  const auto good = make_system(d, {{"exp(x[2])*pd[1][1]", "0"}});
  const auto rep = check_compatibility(good);
  REQUIRE(rep.symbolic);
  CHECK(rep.symbolic->method == "germ-at-base-point");
  CHECK(rep.symbolic->holds);
  CHECK(rep.symbolic->order == 16);
  CHECK(rep.compatible());
  CHECK(rep.points.size() >= 1);

  const auto bad = make_system(d, {{"exp(x[3])*pd[1][1]", "0"}});
  const auto rep2 = check_compatibility(bad);
  CHECK_FALSE(rep2.compatible());
  CHECK(rep2.symbolic->method == "germ-at-base-point");
  CHECK_FALSE(rep2.symbolic->holds);
}

TEST_CASE("linear-field examples") {
  const Dims d{3, 1, 1};
  {
    const auto lf = LinearFieldSystem::zero(d, {0, 0, 0});
    const auto sys = from_linear_fields(lf);
    for (const auto& row : sys.F) {
      for (const auto& e : row) CHECK(e.is_constant(0));
    }
    CHECK(bracket_check(lf));
  }
  {
    auto lf = LinearFieldSystem::zero(d, {0, 0, 0});
    lf.xi[lf.xi_index(0, 0, 0, 0)] = P("x[3]", d);
    CHECK_FALSE(bracket_check(lf));
    const auto sys = from_linear_fields(lf);
    CHECK(to_string(sys.F[0][0]) == "-(x[3]*pd[1][1])");
    CHECK(check_compatibility(sys).verdict() == "violated");
  }
  {
    auto lf = LinearFieldSystem::zero(d, {0, 0, 0});
    lf.xi[lf.xi_index(0, 0, 0, 0)] = P("x[2]", d);
    CHECK(bracket_check(lf));
    const auto rep = check_compatibility(from_linear_fields(lf));
    CHECK(rep.compatible());
  }
  auto bad = LinearFieldSystem::zero(d, {0, 0, 0});
  bad.xi[0] = P("p[1]", d);
  CHECK_THROWS_AS(bracket_check(bad), Error);
}

TEST_CASE("bracket_check agrees with the symbolic verdict on random linear fields") {
  cktest::Rng rng(77);
  int agree_true = 0, agree_false = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = rng.uniform(1, 2);
    const int n = rng.uniform(2, 4);
    const int k = (n == 4 && rng.coin()) ? 2 : 1;
    const Dims d{n, k, m};
    std::vector<VarRef> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(VarRef::x(i));
    // restrict the variables some coefficients see, so commuting cases show up
    std::vector<VarRef> tangential(xs.begin(), xs.begin() + k);
    auto lf = LinearFieldSystem::zero(d, std::vector<Rational>(static_cast<std::size_t>(n)));
    const int style = rng.uniform(0, 2);
    for (auto& c : lf.xi) {
      if (rng.coin(0.5)) continue;
      if (style == 0) c = Expression::constant(rng.rational(2, 1));
      if (style == 1) c = cktest::random_polynomial(rng, tangential, 2, 2);
      if (style == 2) c = cktest::random_polynomial(rng, xs, 2, 2);
    }
    const bool bracket = bracket_check(lf);
    const auto rep = check_compatibility(from_linear_fields(lf));
    REQUIRE(rep.symbolic);
    CHECK(bracket == rep.symbolic->holds);
    if (bracket) {
      CHECK(rep.compatible_at_samples());
      ++agree_true;
    } else {
      ++agree_false;
    }
  }
  CHECK(agree_true > 5);
  CHECK(agree_false > 5);
}
