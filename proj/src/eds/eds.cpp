#include "ck/eds.hpp"

#include "ck/error.hpp"
#include "ck/linalg.hpp"

namespace ck {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

void check_point(const Dims& d, const JetPoint& z) {
  bool ok = z.x.size() == sz(d.n) && z.p.size() == sz(d.m) && z.pj.size() == sz(d.m);
  for (const auto& row : z.pj) ok = ok && row.size() == sz(d.n);
  if (!ok) throw Error(ErrorCode::input, "jet point must have n + m + nm coordinates");
}

// d/dx^i component of e~_a
Rational x_component(const IntegralElementBasis& E, int a, int i) {
  if (i < E.l) return i == a ? 1 : 0;
  return E.c_ab[sz(a)][sz(i - E.l)];
}

}  // namespace

SamplePoint JetPoint::projected(int k) const {
  SamplePoint pt{x, p, {}};
  for (const auto& row : pj) pt.pd.emplace_back(row.begin(), row.begin() + k);
  return pt;
}

JetPoint JetPoint::from_jet(const std::vector<Rational>& x, const Jet2& jet) { return {x, jet.u, jet.u1}; }

IntegralElementBasis IntegralElementBasis::from_jet(const Jet2& jet, int l, std::vector<std::vector<Rational>> c_ab) {
  IntegralElementBasis E;
  E.l = l;
  E.c_ab = std::move(c_ab);
  const std::size_t m = jet.u.size();
  const int n = m ? static_cast<int>(jet.u1[0].size()) : 0;
  for (int a = 0; a < l; ++a) {
    std::vector<Rational> cA(m);
    std::vector<std::vector<Rational>> cAj(m, std::vector<Rational>(sz(n)));
    for (std::size_t A = 0; A < m; ++A) {
      cA[A] = jet.u1[A][sz(a)];
      for (int j = 0; j < n; ++j) cAj[A][sz(j)] = jet.u2[A][sz(a)][sz(j)];
      for (int b = l; b < n; ++b) {
        const Rational& c = E.c_ab[sz(a)][sz(b - l)];
        cA[A] += c * jet.u1[A][sz(b)];
        for (int j = 0; j < n; ++j) cAj[A][sz(j)] += c * jet.u2[A][sz(b)][sz(j)];
      }
    }
    E.c_aA.push_back(std::move(cA));
    E.c_aAj.push_back(std::move(cAj));
  }
  return E;
}

void IntegralElementBasis::validate(int n, int m) const {
  bool ok = l >= 1 && l <= n && c_ab.size() == sz(l) && c_aA.size() == sz(l) && c_aAj.size() == sz(l);
  for (int a = 0; ok && a < l; ++a) {
    ok = c_ab[sz(a)].size() == sz(n - l) && c_aA[sz(a)].size() == sz(m) && c_aAj[sz(a)].size() == sz(m);
    for (int A = 0; ok && A < m; ++A) ok = c_aAj[sz(a)][sz(A)].size() == sz(n);
  }
  if (!ok) throw Error(ErrorCode::input, "integral element basis has the wrong shape");
}

std::vector<std::vector<Rational>> IntegralElementBasis::vectors(int n, int m) const {
  std::vector<std::vector<Rational>> out;
  for (int a = 0; a < l; ++a) {
    std::vector<Rational> v(sz(n + m + m * n));
    for (int i = 0; i < n; ++i) v[sz(i)] = x_component(*this, a, i);
    for (int A = 0; A < m; ++A) {
      v[sz(n + A)] = c_aA[sz(a)][sz(A)];
      for (int j = 0; j < n; ++j) v[sz(n + m + A * n + j)] = c_aAj[sz(a)][sz(A)][sz(j)];
    }
    out.push_back(std::move(v));
  }
  return out;
}

bool ElementResiduals::integral() const {
  for (const auto& row : f) {
    for (const auto& v : row) {
      if (sgn(v) != 0) return false;
    }
  }
  for (const auto& row : g) {
    for (const auto& v : row) {
      if (sgn(v) != 0) return false;
    }
  }
  for (const auto* block : {&g_alpha, &h}) {
    for (const auto& mat : *block) {
      for (const auto& row : mat) {
        for (const auto& v : row) {
          if (sgn(v) != 0) return false;
        }
      }
    }
  }
  return true;
}

ElementResiduals element_residuals(const SystemSpec& sys, const JetPoint& z, const IntegralElementBasis& E) {
  const auto& d = sys.dims;
  check_point(d, z);
  E.validate(d.n, d.m);
  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, z.projected(d.k));
  const int r = d.normal_count();
  const int l = E.l;

  ElementResiduals res;
  res.f.assign(sz(d.m), std::vector<Rational>(sz(r)));
  res.g.assign(sz(d.m), std::vector<Rational>(sz(l)));
  res.g_alpha.assign(sz(d.m), std::vector<std::vector<Rational>>(sz(r), std::vector<Rational>(sz(l))));
  res.h.assign(sz(d.m), std::vector<std::vector<Rational>>(sz(l), std::vector<Rational>(sz(l))));
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) res.f[sz(A)][sz(a)] = z.pj[sz(A)][sz(d.k + a)] - F.F(A, a);
    for (int a = 0; a < l; ++a) {
      // eta^A(e~_a)
      Rational v = E.c_aA[sz(a)][sz(A)];
      for (int i = 0; i < d.n; ++i) v -= z.pj[sz(A)][sz(i)] * x_component(E, a, i);
      res.g[sz(A)][sz(a)] = v;
      // omega^A_alpha(e~_a)
      for (int al = 0; al < r; ++al) {
        Rational w = E.c_aAj[sz(a)][sz(A)][sz(d.k + al)];
        for (int i = 0; i < d.n; ++i) w -= F.Fx(A, al, i) * x_component(E, a, i);
        for (int B = 0; B < d.m; ++B) {
          w -= F.Fp(A, al, B) * E.c_aA[sz(a)][sz(B)];
          for (int G = 0; G < d.k; ++G) w -= F.Fpd(A, al, B, G) * E.c_aAj[sz(a)][sz(B)][sz(G)];
        }
        res.g_alpha[sz(A)][sz(al)][sz(a)] = w;
      }
      // Omega^A(e~_a, e~_a')
      for (int a2 = 0; a2 < l; ++a2) {
        Rational h = 0;
        for (int i = 0; i < d.n; ++i) {
          h += E.c_aAj[sz(a)][sz(A)][sz(i)] * x_component(E, a2, i) - E.c_aAj[sz(a2)][sz(A)][sz(i)] * x_component(E, a, i);
        }
        res.h[sz(A)][sz(a)][sz(a2)] = h;
      }
    }
  }
  return res;
}

PolarSpaceResult polar_space(const SystemSpec& sys, const JetPoint& z, const IntegralElementBasis& E) {
  const auto& d = sys.dims;
  const auto res = element_residuals(sys, z, E);
  if (!res.integral()) throw Error(ErrorCode::invalid_argument, "E is not an integral element at z");
  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, z.projected(d.k));
  const int n = d.n, m = d.m, r = d.normal_count();
  const std::size_t dim = sz(n + m + m * n);
  auto X = [](int i) { return sz(i); };
  auto Pv = [&](int A) { return sz(n + A); };
  auto Pj = [&](int A, int j) { return sz(n + m + A * n + j); };

  std::vector<std::vector<Rational>> rows;
  for (int A = 0; A < m; ++A) {
    for (int al = 0; al < r; ++al) {
      std::vector<Rational> row(dim);
      row[Pj(A, d.k + al)] += 1;
      for (int j = 0; j < n; ++j) row[X(j)] -= F.Fx(A, al, j);
      for (int B = 0; B < m; ++B) {
        row[Pv(B)] -= F.Fp(A, al, B);
        for (int L = 0; L < d.k; ++L) row[Pj(B, L)] -= F.Fpd(A, al, B, L);
      }
      rows.push_back(std::move(row));
    }
    std::vector<Rational> eta(dim);
    eta[Pv(A)] = 1;
    for (int i = 0; i < n; ++i) eta[X(i)] = -z.pj[sz(A)][sz(i)];
    rows.push_back(std::move(eta));
    for (int a = 0; a < E.l; ++a) {
      std::vector<Rational> row(dim);
      for (int i = 0; i < n; ++i) {
        row[Pj(A, i)] += x_component(E, a, i);
        row[X(i)] -= E.c_aAj[sz(a)][sz(A)][sz(i)];
      }
      rows.push_back(std::move(row));
    }
  }

  PolarSpaceResult out;
  out.basis = nullspace(RationalMatrix::from_rows(rows, dim));
  out.dimension = static_cast<int>(out.basis.size());

  // H(E) is a graph over dx when the x-projection of the basis is bijective
  if (out.dimension == n) {
    RationalMatrix proj(sz(n), sz(n));
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < n; ++i) proj(sz(i), sz(b)) = out.basis[sz(b)][sz(i)];
    }
    if (sgn(determinant(proj)) != 0) {
      std::vector<std::vector<Rational>> graph;
      for (int j = 0; j < n; ++j) {
        std::vector<Rational> unit(sz(n));
        unit[sz(j)] = 1;
        const auto coef = solve_linear(proj, unit).solution;
        std::vector<Rational> v(dim);
        for (int b = 0; b < n; ++b) {
          for (std::size_t t = 0; t < dim; ++t) v[t] += coef[sz(b)] * out.basis[sz(b)][t];
        }
        graph.push_back(std::move(v));
      }
      out.graph = std::move(graph);
    }
  }

  if (E.l >= d.k) {
    Slope slope = Slope::zero(d);
    for (int al = 0; al < r; ++al) {
      for (int L = 0; L < d.k; ++L) slope.c[sz(al)][sz(L)] = x_component(E, L, d.k + al);
    }
    const auto pt = z.projected(d.k);
    out.noncharacteristic = slope_noncharacteristic(sys, slope, pt).noncharacteristic;
    if (out.noncharacteristic && (out.dimension > n)) {
      throw Error(ErrorCode::invalid_argument, "polar space exceeds dimension n over a non-characteristic element");
    }
  }
  return out;
}

}  // namespace ck
