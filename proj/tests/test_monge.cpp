#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ck/compat.hpp"
#include "ck/mongeampere.hpp"
#include "support.hpp"

using namespace ck;

namespace {

using Vec = std::vector<Rational>;

const std::size_t kN = 3;

TruncatedSeries y(std::size_t arity, int order, std::size_t i) { return TruncatedSeries::variable(arity, order, i); }
TruncatedSeries t1(int order) { return y(1, order, 0); }

MongeRhs rhs_from(int n, const std::vector<std::vector<std::string>>& table) {
  MongeRhs rhs = MongeRhs::zero(n);
  const ParseOptions opts{Dims{n, 1, n}, true};
  for (int a = 1; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto e = parse_expression(table[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)], opts);
      rhs.f[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = e;
      rhs.f[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(a - 1)] = e;
    }
  }
  return rhs;
}

bool same_function(const Expression& a, const Expression& b, const Dims& d) {
  const auto fa = to_rational_function(a, d), fb = to_rational_function(b, d);
  REQUIRE(fa);
  REQUIRE(fb);
  return (*fa - *fb).is_zero();
}

// (x1 + x2)^2 / 2 in three variables
TruncatedSeries tilted_cylinder(int order) {
  const auto s = y(kN, order, 0) + y(kN, order, 1);
  return Rational(1, 2) * (s * s);
}

}  // namespace

TEST_CASE("delta minors") {
  const auto half = Rational(1, 2);
  const auto u1 = half * (y(kN, 4, 0) * y(kN, 4, 0));
  for (int a = 1; a < 3; ++a) {
    for (int b = 1; b < 3; ++b) CHECK(delta_minor(u1, a, b).is_zero());
  }
  const auto u2 = half * (y(kN, 4, 0) * y(kN, 4, 0) + y(kN, 4, 1) * y(kN, 4, 1));
  CHECK(delta_minor(u2, 1, 1) == TruncatedSeries::constant(kN, 2, 1));
  const auto u3 = y(kN, 4, 0) * y(kN, 4, 1);
  CHECK(delta_minor(u3, 1, 1) == TruncatedSeries::constant(kN, 2, -1));
  CHECK_THROWS_AS(delta_minor(TruncatedSeries(kN, 1), 1, 1), Error);
  CHECK_THROWS_AS(delta_minor(u3, 0, 1), Error);

  cktest::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = rng.series(kN, 5, 10);
    CHECK(delta_minor(u, 1, 2) == delta_minor(u, 2, 1));
  }
}

TEST_CASE("classifying right-hand sides") {
  SUBCASE("potential x2 x3") {
    const auto rep = classify_rhs(rhs_from(3, {{"0", "t"}, {"", "0"}}));
    CHECK(rep.admissible);
    CHECK(rep.verdict() == "admissible");
    CHECK(rep.method == "rational-identity");
    REQUIRE(rep.potential);
    CHECK(*rep.potential == y(kN, 8, 1) * y(kN, 8, 2));
    REQUIRE(rep.g);
    CHECK((*rep.g)[0][1].is_constant(1));
  }
  SUBCASE("t-independent constant") {
    const auto rep = classify_rhs(rhs_from(3, {{"1", "0"}, {"", "0"}}));
    CHECK_FALSE(rep.admissible);
    CHECK(rep.verdict() == "inadmissible: t-independent nonzero f");
    REQUIRE(rep.witnesses.size() == 1);
    CHECK(rep.witnesses[0].alpha == 2);
  }
  SUBCASE("x1 dependence") {
    const auto rep = classify_rhs(rhs_from(3, {{"x[1]*t", "0"}, {"", "0"}}));
    CHECK(rep.linear_in_t);
    CHECK_FALSE(rep.admissible);
    REQUIRE(rep.witnesses.size() == 1);
    CHECK(rep.witnesses[0].condition == "d1 g");
    CHECK(rep.witnesses[0].expression == "1");
    CHECK(rep.witnesses[0].label() == "d1 g_2,2 = 1");
  }
  SUBCASE("not closed") {
    // g_22 = x3, g_23 = 0: d3 g22 != d2 g23
    const auto rep = classify_rhs(rhs_from(3, {{"x[3]*t", "0"}, {"", "0"}}));
    CHECK_FALSE(rep.admissible);
    REQUIRE(!rep.witnesses.empty());
    CHECK(rep.witnesses[0].condition == "closedness");
    CHECK(rep.verdict() == "inadmissible: g violates the closedness conditions");
  }
  SUBCASE("nonlinear in t") {
    const auto rep = classify_rhs(rhs_from(3, {{"t*t", "0"}, {"", "0"}}));
    CHECK_FALSE(rep.linear_in_t);
    CHECK(rep.verdict() == "inadmissible: f is not of the form g*t");
  }
  SUBCASE("transcendental coefficients use the germ test") {
    const auto rep = classify_rhs(rhs_from(3, {{"exp(x[2])*t", "0"}, {"", "0"}}));
    CHECK(rep.method == "germ-at-base-point");
    CHECK(rep.admissible);
    REQUIRE(rep.potential);
    // d2 d2 v = exp(x2)
    const auto v22 = derivative(derivative(*rep.potential, 1), 1);
    CHECK(v22.coefficient(MultiIndex{0, 3, 0}) == Rational(1, 6));
    CHECK(derivative(*rep.potential, 0).is_zero());
  }
  SUBCASE("n = 2 is inconclusive") {
    const auto rep = classify_rhs(rhs_from(2, {{"1"}}));
    CHECK_FALSE(rep.conclusive);
    CHECK(rep.verdict() == "no conclusion for n = 2");
  }
  SUBCASE("asymmetric input") {
    auto rhs = MongeRhs::zero(3);
    rhs.f[0][1] = Expression::variable(VarRef::t());
    CHECK_THROWS_AS(classify_rhs(rhs), Error);
  }
}

TEST_CASE("potentials reproduce random Hessian right-hand sides") {
  cktest::Rng rng(17);
  const std::vector<VarRef> xs{VarRef::x(2), VarRef::x(3)};
  const Dims d{3, 1, 3};
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = cktest::random_polynomial(rng, xs, 4, 4);
    auto rhs = MongeRhs::zero(3);
    const auto t = Expression::variable(VarRef::t());
    for (int a = 1; a < 3; ++a) {
      for (int b = 1; b < 3; ++b) {
        rhs.f[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] =
            make_product(differentiate(differentiate(v, VarRef::x(a + 1)), VarRef::x(b + 1)), t);
      }
    }
    const auto rep = classify_rhs(rhs, 6);
    REQUIRE(rep.admissible);
    REQUIRE(rep.potential);
    SeriesEnv env{kN, 6, {}};
    for (int i = 0; i < 3; ++i) env.bindings[VarRef::x(i + 1)] = y(kN, 6, static_cast<std::size_t>(i));
    const auto vs = evaluate(v, env);
    // the potential differs from v by an affine function
    for (int a = 1; a < 3; ++a) {
      for (int b = 1; b < 3; ++b) {
        CHECK(derivative(derivative(*rep.potential, static_cast<std::size_t>(a)), static_cast<std::size_t>(b)) ==
              derivative(derivative(vs, static_cast<std::size_t>(a)), static_cast<std::size_t>(b)));
      }
    }
    CHECK(rep.potential->lowest_degree() != 0);
    CHECK(rep.potential->lowest_degree() != 1);
    (void)d;
  }
}

TEST_CASE("reduction to a first-order system") {
  const Dims d{3, 1, 3};
  const auto P = [&](const std::string& s) { return parse_expression(s, d); };
  const auto red = reduce_to_first_order(MongeRhs::zero(3));
  CHECK(red.system.dims.m == 3);
  CHECK(red.system.dims.k == 1);
  for (int a = 1; a < 3; ++a) {
    const std::string pa = "pd[" + std::to_string(a + 1) + "][1]";
    CHECK(same_function(red.system.rhs(0, a - 1), P(pa), d));
    for (int b = 1; b < 3; ++b) {
      const std::string pb = "pd[" + std::to_string(b + 1) + "][1]";
      CHECK(same_function(red.system.rhs(b, a - 1), P(pb + "*" + pa + "/pd[1][1]"), d));
    }
  }
  REQUIRE(red.system.guards.size() == 1);
  CHECK(to_string(red.system.guards[0]) == "pd[1][1]");

  const auto red2 = reduce_to_first_order(rhs_from(3, {{"t", "0"}, {"", "0"}}));
  CHECK(same_function(red2.system.rhs(1, 0), P("pd[2][1]*pd[2][1]/pd[1][1] + 1"), d));
}

TEST_CASE("compatibility tensors of the reduced system match the closed forms") {
  cktest::Rng rng(29);
  const int n = 3;
  const Dims d{n, 1, n};
  std::vector<VarRef> vars{VarRef::x(1), VarRef::x(2), VarRef::x(3), VarRef::t()};
  int points = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto rhs = MongeRhs::zero(n);
    for (int a = 0; a < 2; ++a) {
      for (int b = a; b < 2; ++b) rhs.f[a][b] = rhs.f[b][a] = cktest::random_polynomial(rng, vars, 2, 3);
    }
    const auto sys = reduce_to_first_order(rhs).system;
    const SystemCalculus calc(sys);
    for (int s = 0; s < 5; ++s) {
      SamplePoint pt;
      for (int i = 0; i < n; ++i) pt.x.push_back(rng.rational());
      for (int A = 0; A < n; ++A) {
        pt.p.push_back(rng.rational());
        pt.pd.push_back({rng.rational()});
      }
      if (sgn(pt.pd[0][0]) == 0) pt.pd[0][0] = Rational(1, 2);
      const auto T = phi_psi(calc, pt);
      const Rational p = pt.pd[0][0];
      auto pa = [&](int c) { return pt.pd[static_cast<std::size_t>(c)][0]; };  // c is a coordinate, 0-based
      auto env = pt.env();
      std::map<VarRef, Rational> fenv;
      for (int i = 0; i < n; ++i) fenv[VarRef::x(i + 1)] = pt.x[static_cast<std::size_t>(i)];
      fenv[VarRef::t()] = p;
      // f_{ab} and its derivatives, a and b coordinates >= 1
      auto f = [&](int a, int b) { return evaluate_at(rhs.at(a, b), fenv); };
      auto fx = [&](int a, int b, int i) { return evaluate_at(differentiate(rhs.at(a, b), VarRef::x(i + 1)), fenv); };
      auto ft = [&](int a, int b) { return evaluate_at(differentiate(rhs.at(a, b), VarRef::t()), fenv); };
      auto delta = [](int i, int j) { return Rational(i == j ? 1 : 0); };
      for (int al = 1; al < n; ++al) {
        for (int be = 1; be < n; ++be) {
          const int a = al - 1, b = be - 1;
          CHECK(T.Phi(0, a, b) == fx(al, be, 0) / p);
          CHECK(T.Psi(0, 0, 0, a, b, 0) == -2 * (pa(al) * pa(be) + f(al, be)) / (p * p) + 2 * ft(al, be) / p);
          for (int ga = 1; ga < n; ++ga) {
            CHECK(T.Phi(ga, a, b) == fx(ga, al, be) / p + (pa(ga) * fx(al, be, 0) + pa(al) * fx(ga, be, 0)) / (p * p));
            CHECK(T.Psi(0, 0, 0, a, b, ga) == 2 * (delta(al, ga) * pa(be) + delta(be, ga) * pa(al)) / p);
            CHECK(T.Psi(ga, 0, 0, a, b, 0) ==
                  -2 * (2 * pa(al) * pa(be) * pa(ga) + pa(ga) * f(al, be) + pa(al) * f(ga, be)) / (p * p * p) +
                      2 * (pa(ga) * ft(al, be) + pa(al) * ft(ga, be)) / (p * p));
            for (int la = 1; la < n; ++la) {
              CHECK(T.Psi(ga, 0, 0, a, b, la) ==
                    2 * (delta(al, la) * pa(ga) * pa(be) + delta(be, la) * pa(al) * pa(ga) + delta(ga, la) * pa(be) * pa(al)) /
                            (p * p) -
                        2 * (f(al, ga) / (p * p) - ft(al, ga) / p) * delta(be, la));
            }
          }
        }
      }
      (void)env;
      ++points;
    }
  }
  CHECK(points == 50);
}

TEST_CASE("full second-order solves") {
  const int N = 6;
  const auto half = Rational(1, 2);
  const auto x1sq = half * (t1(N) * t1(N));
  SUBCASE("cylinder") {
    const auto sol = solve_full(MongeRhs::zero(3), MongeData{x1sq, {TruncatedSeries(1, N), TruncatedSeries(1, N)}}, N);
    CHECK(sol.u == half * (y(kN, N, 0) * y(kN, N, 0)));
  }
  SUBCASE("tilted cylinder") {
    const auto sol = solve_full(MongeRhs::zero(3), MongeData{x1sq, {t1(N), TruncatedSeries(1, N)}}, N);
    CHECK(sol.u == tilted_cylinder(N));
  }
  SUBCASE("moment-curve data") {
    const auto cube = Rational(1, 6) * (t1(N) * t1(N) * t1(N));
    const MongeData data{x1sq, {x1sq, cube}};
    const auto sol = solve_full(MongeRhs::zero(3), data, N);
    // restrictions to the x1 axis reproduce the data
    const std::size_t normal[] = {1, 2};
    CHECK(restrict_to_zero(sol.u, normal) == x1sq);
    CHECK(restrict_to_zero(derivative(sol.u, 1), normal) == x1sq.truncated(N - 1));
    CHECK(restrict_to_zero(derivative(sol.u, 2), normal) == cube.truncated(N - 1));
    CHECK(hessian_rank_profile(sol.u).rank_one);
    // the gradient solves the reduced system
    CauchyData cd{{derivative(x1sq, 0), x1sq.truncated(N - 1), cube.truncated(N - 1)}};
    CHECK(residual(sol.reduced, SolutionSeries{sol.reduced.dims, N - 1, sol.gradient}, cd).clean());
  }
  SUBCASE("right-hand side with a potential") {
    // f_23 = t: u = x1^2/2 + x2 x3 solves Delta_23 = u11 u23 = t
    const auto rhs = rhs_from(3, {{"0", "t"}, {"", "0"}});
    const auto sol = solve_full(rhs, MongeData{x1sq, {TruncatedSeries(1, N), TruncatedSeries(1, N)}}, N);
    CHECK(sol.u == half * (y(kN, N, 0) * y(kN, N, 0)) + y(kN, N, 1) * y(kN, N, 2));
  }
  SUBCASE("n = 2 accepts any right-hand side") {
    // Delta_22 = 1 with u = (x1^2 + x2^2)/2
    const auto sol = solve_full(rhs_from(2, {{"1"}}), MongeData{x1sq, {TruncatedSeries(1, N)}}, N);
    CHECK(sol.u == half * (y(2, N, 0) * y(2, N, 0) + y(2, N, 1) * y(2, N, 1)));
  }
  SUBCASE("failures") {
    const MongeData flat{t1(N), {TruncatedSeries(1, N), TruncatedSeries(1, N)}};
    CHECK_THROWS_AS(solve_full(MongeRhs::zero(3), flat, N), Error);
    try {
      solve_full(rhs_from(3, {{"1", "0"}, {"", "0"}}), MongeData{x1sq, {TruncatedSeries(1, N), TruncatedSeries(1, N)}}, N);
      FAIL("expected an inadmissible right-hand side");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::incompatible);
    }
  }
}

TEST_CASE("admissible right-hand sides solve; inadmissible ones lose the approximate jet") {
  cktest::Rng rng(41);
  const std::vector<VarRef> xs{VarRef::x(2), VarRef::x(3)};
  const int N = 5;
  const auto t = Expression::variable(VarRef::t());
  for (int trial = 0; trial < 8; ++trial) {
    const auto v = cktest::random_polynomial(rng, xs, 3, 3);
    auto rhs = MongeRhs::zero(3);
    for (int a = 1; a < 3; ++a) {
      for (int b = 1; b < 3; ++b) {
        rhs.f[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] =
            make_product(differentiate(differentiate(v, VarRef::x(a + 1)), VarRef::x(b + 1)), t);
      }
    }
    MongeData data{rng.series(1, N, 4), {rng.series(1, N, 3), rng.series(1, N, 3)}};
    data.a.set_coefficient(MultiIndex{2}, rng.nonzero_rational());
    const auto sol = solve_full(rhs, data, N);
    // residual oracle: Delta_ab(u) = g_ab u_11, recomputed from second derivatives
    const auto u11 = derivative(derivative(sol.u, 0), 0);
    SeriesEnv env{kN, N - 2, {}};
    for (int i = 0; i < 3; ++i) env.bindings[VarRef::x(i + 1)] = y(kN, N - 2, static_cast<std::size_t>(i));
    for (int a = 1; a < 3; ++a) {
      for (int b = 1; b < 3; ++b) {
        const auto g = evaluate(differentiate(differentiate(v, VarRef::x(a + 1)), VarRef::x(b + 1)), env);
        const auto ua = derivative(sol.u, static_cast<std::size_t>(a)), ub = derivative(sol.u, static_cast<std::size_t>(b));
        const auto lhs = u11 * derivative(ua, static_cast<std::size_t>(b)) - derivative(ub, 0) * derivative(ua, 0);
        CHECK(agree_to_order(lhs, g * u11, N - 2));
      }
    }
  }

  for (const auto& table : std::vector<std::vector<std::vector<std::string>>>{
           {{"x[3]*t", "0"}, {"", "0"}}, {{"x[1]*t", "0"}, {"", "0"}}, {{"0", "x[2]*t"}, {"", "0"}}}) {
    const auto rhs = rhs_from(3, table);
    CHECK_FALSE(classify_rhs(rhs).admissible);
    // the x1-dependence only shows once some p^a_1 is nonzero, so sample several base points
    auto sys = reduce_to_first_order(rhs).system;
    bool failed = false;
    for (const Rational& p2 : {Rational(0), Rational(1)}) {
      for (const Rational& p3 : {Rational(0), Rational(2)}) {
        sys.pprime0[1][0] = p2;
        sys.pprime0[2][0] = p3;
        failed = failed || !approximately_solvable(sys);
      }
    }
    CHECK(failed);
  }
}

TEST_CASE("Hessian rank profiles") {
  const int N = 8;
  CHECK(hessian_rank_profile(tilted_cylinder(N)).rank_one);
  const auto half = Rational(1, 2);
  const auto p = hessian_rank_profile(half * (y(kN, N, 0) * y(kN, N, 0) + y(kN, N, 1) * y(kN, N, 1)));
  CHECK_FALSE(p.rank_one);
  CHECK(p.alpha == 1);
  CHECK(p.beta == 1);
  CHECK(p.value == 1);

  // -log cos(x1), constant in x2 and x3
  const auto c = unary_analytic(AnalyticKind::cos, y(kN, N, 0));
  const auto u = -unary_analytic(AnalyticKind::log, c);
  CHECK(u.coefficient(MultiIndex{4, 0, 0}) == Rational(1, 12));
  CHECK(hessian_rank_profile(u).rank_one);

  CHECK_THROWS_AS(hessian_rank_profile(y(kN, N, 0) * y(kN, N, 1)), Error);
}
