#include "ck/geometry.hpp"

#include "ck/error.hpp"
#include "ck/linalg.hpp"
#include "ck/mongeampere.hpp"

namespace ck {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

SurdVector normalize(std::vector<Rational> v, const Rational& radicand) {
  if (auto r = exact_sqrt(radicand)) {
    for (auto& c : v) c /= *r;
    return {std::move(v), 1};
  }
  return {std::move(v), radicand};
}

Rational norm2(const std::vector<Rational>& x) {
  Rational s = 0;
  for (const auto& c : x) s += c * c;
  return s;
}

void multi_indices(std::size_t arity, int degree, std::size_t from, MultiIndex current, std::vector<MultiIndex>& out) {
  if (from + 1 == arity) {
    std::vector<int> e = current.exponents();
    e[from] += degree;
    out.emplace_back(std::move(e));
    return;
  }
  for (int d = degree; d >= 0; --d) {
    multi_indices(arity, degree - d, from + 1, current.shifted(from, d), out);
  }
}

std::vector<Rational> gradient_at_origin(const TruncatedSeries& u, const MultiIndex& I) {
  std::vector<Rational> v;
  for (std::size_t i = 0; i < u.arity(); ++i) v.push_back(u.derivative_at_origin(I + MultiIndex::unit(u.arity(), i)));
  return v;
}

std::vector<std::size_t> normal_vars(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < n; ++i) out.push_back(i);
  return out;
}

}  // namespace

SurdVector stereographic_forward(const std::vector<Rational>& x) {
  const Rational s = 1 - norm2(x);
  if (sgn(s) <= 0) throw Error(ErrorCode::invalid_argument, "stereographic projection needs |x| < 1");
  return normalize(x, s);
}

SurdVector stereographic_inverse(const std::vector<Rational>& y) {
  std::vector<Rational> v = y;
  v.push_back(-1);
  return normalize(std::move(v), 1 + norm2(y));
}

SphereCurve SphereCurve::from_unnormalized(const std::vector<TruncatedSeries>& v, int order) {
  SphereCurve c;
  c.n = static_cast<int>(v.size());
  c.order = order;
  TruncatedSeries s = TruncatedSeries::constant(1, order, 1);
  for (const auto& vj : v) s = s + vj.truncated(order) * vj.truncated(order);
  const auto r = unary_analytic(AnalyticKind::reciprocal, unary_analytic(AnalyticKind::sqrt, s));
  for (const auto& vj : v) c.gamma.push_back((vj.truncated(order) * r).truncated(order));
  c.gamma.push_back(-r);
  return c;
}

void SphereCurve::validate() const {
  if (n < 1 || gamma.size() != sz(n + 1)) throw Error(ErrorCode::input, "a curve on S^n needs n + 1 components");
  for (const auto& g : gamma) {
    if (g.arity() != 1 || g.order() < order) throw Error(ErrorCode::input, "curve components must be univariate series of the stated order");
  }
  TruncatedSeries s(1, order);
  for (const auto& g : gamma) s = s + g * g;
  if (!agree_to_order(s, TruncatedSeries::constant(1, order, 1), order)) {
    throw Error(ErrorCode::invalid_argument, "curve does not lie on the unit sphere");
  }
  for (int j = 0; j <= n; ++j) {
    const Rational c0 = gamma[sz(j)].constant_term();
    const Rational c1 = gamma[sz(j)].coefficient(MultiIndex{1});
    if (c0 != (j == n ? -1 : 0)) throw Error(ErrorCode::invalid_argument, "curve must start at the south pole");
    if (c1 != (j == 0 ? 1 : 0)) throw Error(ErrorCode::invalid_argument, "curve must leave the south pole with velocity e_1");
  }
}

CurveData curve_to_cauchy_data(const SphereCurve& gamma) {
  gamma.validate();
  const int n = gamma.n;
  const auto inv = unary_analytic(AnalyticKind::reciprocal, -gamma.gamma[sz(n)].truncated(gamma.order));
  CurveData out;
  for (int j = 0; j < n; ++j) out.Gamma.push_back(gamma.gamma[sz(j)].truncated(gamma.order) * inv);
  out.phi = out.Gamma[0];
  out.a = antiderivative(out.phi, 0).truncated(gamma.order);
  for (int j = 1; j < n; ++j) out.a_n.push_back(out.Gamma[sz(j)]);
  return out;
}

HypersurfaceModel construct_from_curve(const SphereCurve& gamma, int order) {
  if (gamma.n < 2) throw Error(ErrorCode::input, "hypersurfaces from curves need n >= 2");
  if (gamma.order < order) throw Error(ErrorCode::input, "curve order is below the requested order");
  auto data = curve_to_cauchy_data(gamma);
  const int n = gamma.n;
  MongeData md{data.a.truncated(order), {}};
  for (const auto& s : data.a_n) md.a_n.push_back(s.truncated(order - 1));
  const auto sol = solve_full(MongeRhs::zero(n), md, order);

  if (!hessian_rank_profile(sol.u).rank_one) throw Error(ErrorCode::residual, "constructed hypersurface has a Hessian of rank above one");
  const auto normal = normal_vars(sz(n));
  for (int i = 0; i < n; ++i) {
    const auto axis = restrict_to_zero(derivative(sol.u, sz(i)), normal);
    if (!agree_to_order(axis, data.Gamma[sz(i)], order - 1)) {
      throw Error(ErrorCode::residual, "gradient along the x1 axis differs from the projected curve in component " + std::to_string(i + 1));
    }
  }
  return {sol.u, std::move(data)};
}

NondegeneracyReport nondegeneracy_analysis(const HypersurfaceModel& h, int j_max) {
  const auto& u = h.u;
  const std::size_t n = u.arity();
  const int N = u.order();
  if (j_max < 0 || j_max > N - 1) {
    throw Error(ErrorCode::invalid_argument, "j_max must lie between 0 and N - 1 = " + std::to_string(N - 1));
  }
  NondegeneracyReport rep;
  rep.n = static_cast<int>(n);
  rep.j_max = j_max;

  auto span_by_degree = [&](int top) {
    std::vector<std::vector<Rational>> rows;
    std::vector<int> dims;
    for (int j = 0; j <= top; ++j) {
      std::vector<MultiIndex> idx;
      multi_indices(n, j, 0, MultiIndex(n), idx);
      for (const auto& I : idx) rows.push_back(gradient_at_origin(u, I));
      dims.push_back(static_cast<int>(span_rank(rows, n)));
    }
    return std::make_pair(rows, dims);
  };
  rep.span_dims = span_by_degree(j_max).second;
  for (int j = 0; j <= j_max; ++j) {
    if (rep.span_dims[sz(j)] == static_cast<int>(n)) {
      rep.l = j;
      break;
    }
  }

  bool rank_one = false;
  if (n >= 2 && N >= 2 && sgn(u.coefficient(MultiIndex::unit(n, 0, 2))) != 0) rank_one = hessian_rank_profile(u).rank_one;
  if (n == 1) rank_one = sgn(u.coefficient(MultiIndex{2})) != 0;

  std::vector<std::vector<Rational>> moment;
  if (rank_one) {
    std::vector<int> reduced;
    for (int m = 0; m <= N - 1; ++m) {
      moment.push_back(gradient_at_origin(u, MultiIndex::unit(n, 0, m)));
      if (m <= j_max) reduced.push_back(static_cast<int>(span_rank(moment, n)));
    }
    if (reduced != rep.span_dims) throw Error(ErrorCode::residual, "pure x1 derivatives span less than all derivatives");
    rep.reduced_dims = reduced;

    // vectors (a^(m)(0), a_a^(m-1)(0)) of the Cauchy data read off the axis
    const auto normal = normal_vars(n);
    const auto a = restrict_to_zero(u, normal);
    std::vector<TruncatedSeries> an;
    for (std::size_t i = 1; i < n; ++i) an.push_back(restrict_to_zero(derivative(u, i), normal));
    std::vector<std::vector<Rational>> rows;
    std::vector<int> dd;
    for (int m = 1; m <= j_max + 1; ++m) {
      std::vector<Rational> v{a.derivative_at_origin(MultiIndex{m})};
      for (const auto& s : an) v.push_back(s.derivative_at_origin(MultiIndex{m - 1}));
      rows.push_back(std::move(v));
      dd.push_back(static_cast<int>(span_rank(rows, n)));
    }
    if (dd != reduced) throw Error(ErrorCode::residual, "Cauchy data vectors disagree with the pure x1 spans");
    rep.data_dims = dd;
  } else {
    moment = span_by_degree(N - 1).first;
  }
  rep.normals = nullspace(RationalMatrix::from_rows(moment, n));
  rep.hyperplane = !rep.normals.empty();

  if (N >= 2) {
    RationalMatrix H(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) H(i, k) = u.derivative_at_origin(MultiIndex::unit(n, i) + MultiIndex::unit(n, k));
    }
    rep.levi_rank = static_cast<int>(rank(H));
  }

  if (j_max >= 1) rep.span_rank_minus_one = rep.span_dims[1] - 1;

  if (rep.hyperplane) {
    rep.levi_number = "not finitely nondegenerate at 0";
  } else if (rank_one && rep.l) {
    rep.levi_number = "n";
  } else {
    rep.levi_number = "undetermined";
  }
  return rep;
}

std::string NondegeneracyReport::summary() const {
  std::string s = l ? "l = " + std::to_string(*l) + " at 0" : "not finitely nondegenerate at 0 up to j = " + std::to_string(j_max);
  return s + "; Levi number verdict: " + levi_number;
}

}  // namespace ck
