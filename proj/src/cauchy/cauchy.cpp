#include "ck/cauchy.hpp"

#include <algorithm>
#include <map>

namespace ck {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Jet2 empty_jet(const Dims& d) {
  Jet2 j;
  j.u.assign(sz(d.m), Rational(0));
  j.u1.assign(sz(d.m), std::vector<Rational>(sz(d.n)));
  j.u2.assign(sz(d.m), std::vector<std::vector<Rational>>(sz(d.n), std::vector<Rational>(sz(d.n))));
  return j;
}

void check_data_shape(const Dims& d, const DataJet2& data) {
  bool ok = data.a.size() == sz(d.m) && data.a1.size() == sz(d.m) && data.a2.size() == sz(d.m);
  for (int A = 0; ok && A < d.m; ++A) {
    ok = data.a1[sz(A)].size() == sz(d.k) && data.a2[sz(A)].size() == sz(d.k);
    for (int L = 0; ok && L < d.k; ++L) {
      ok = data.a2[sz(A)][sz(L)].size() == sz(d.k);
      for (int G = 0; ok && G < d.k; ++G) ok = data.a2[sz(A)][sz(L)][sz(G)] == data.a2[sz(A)][sz(G)][sz(L)];
    }
  }
  if (!ok) throw Error(ErrorCode::input, "data 2-jet has the wrong shape or an asymmetric second-derivative block");
}

std::vector<Witness> base_point_witnesses(const SystemCalculus& calc) {
  const auto t = phi_psi(calc, calc.system().base_point());
  std::vector<Witness> out;
  const auto& d = t.dims;
  const int r = d.normal_count();
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        if (t.Phi(A, a, b) != t.Phi(A, b, a)) {
          out.push_back({"phi", {A + 1, d.k + a + 1, d.k + b + 1}, 0, t.Phi(A, a, b) - t.Phi(A, b, a), {}});
        }
      }
    }
  }
  for (int A = 0; A < d.m; ++A) {
    for (int G = 0; G < d.k; ++G) {
      for (int L = 0; L < d.k; ++L) {
        for (int a = 0; a < r; ++a) {
          for (int b = a + 1; b < r; ++b) {
            for (int C = 0; C < d.m; ++C) {
              const auto& x = t.Psi(A, G, L, a, b, C);
              const auto& y = t.Psi(A, G, L, b, a, C);
              if (x != y) out.push_back({"psi", {A + 1, G + 1, L + 1, d.k + a + 1, d.k + b + 1, C + 1}, 0, x - y, {}});
            }
          }
        }
      }
    }
  }
  return out;
}

SeriesEnv solution_env(const SystemSpec& sys, const std::vector<TruncatedSeries>& u, int order) {
  const auto& d = sys.dims;
  const std::size_t n = sz(d.n);
  SeriesEnv env{n, order, {}};
  for (int i = 0; i < d.n; ++i) env.bindings[VarRef::x(i + 1)] = TruncatedSeries::variable(n, order, sz(i), sys.x0[sz(i)]);
  for (int A = 0; A < d.m; ++A) {
    env.bindings[VarRef::p(A + 1)] = u[sz(A)].truncated(order);
    for (int L = 0; L < d.k; ++L) env.bindings[VarRef::pd(A + 1, L + 1)] = derivative(u[sz(A)], sz(L)).truncated(order);
  }
  return env;
}

TruncatedSeries evaluate_guarded(const Expression& e, const SeriesEnv& env) {
  try {
    return evaluate(e, env);
  } catch (const Error& err) {
    throw Error(ErrorCode::guard_violation, std::string("composition failed: ") + err.what());
  }
}

// All exponent vectors of `vars` variables with total degree exactly `total`.
void exponent_vectors(int vars, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == vars - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = total; e >= 0; --e) {
    cur.push_back(e);
    exponent_vectors(vars, total - e, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> exponent_vectors(int vars, int total) {
  std::vector<std::vector<int>> out;
  if (vars == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  std::vector<int> cur;
  exponent_vectors(vars, total, cur, out);
  return out;
}

std::vector<std::size_t> normal_vars(const Dims& d) {
  std::vector<std::size_t> v;
  for (int i = d.k; i < d.n; ++i) v.push_back(sz(i));
  return v;
}

Expression symbolic_determinant(const std::vector<std::vector<Expression>>& M) {
  const std::size_t n = M.size();
  if (n == 1) return M[0][0];
  Expression acc = Expression::constant(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (M[0][j].is_constant(0)) continue;
    std::vector<std::vector<Expression>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Expression> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j) row.push_back(M[r][c]);
      }
      minor.push_back(std::move(row));
    }
    Expression term = make_product(M[0][j], symbolic_determinant(minor));
    acc = j % 2 == 0 ? make_sum(acc, term) : make_difference(acc, term);
  }
  return acc;
}

bool identically_zero(const Expression& e, const Dims& d) {
  if (e.is_constant()) return e.is_constant(0);
  if (auto f = to_rational_function(e, d)) return f->is_zero();
  return false;
}

}  // namespace

int CauchyData::order() const {
  int o = a.empty() ? 0 : a.front().order();
  for (const auto& s : a) o = std::min(o, s.order());
  return o;
}

DataJet2 DataJet2::from(const CauchyData& data) {
  DataJet2 j;
  for (const auto& s : data.a) {
    const std::size_t k = s.arity();
    j.a.push_back(s.constant_term());
    std::vector<Rational> first;
    std::vector<std::vector<Rational>> second(k, std::vector<Rational>(k));
    for (std::size_t L = 0; L < k; ++L) {
      first.push_back(s.derivative_at_origin(MultiIndex::unit(k, L)));
      for (std::size_t G = 0; G < k; ++G) {
        second[L][G] = s.derivative_at_origin(MultiIndex::unit(k, L) + MultiIndex::unit(k, G));
      }
    }
    j.a1.push_back(std::move(first));
    j.a2.push_back(std::move(second));
  }
  return j;
}

Slope Slope::zero(const Dims& d) {
  return {std::vector<std::vector<Rational>>(sz(d.normal_count()), std::vector<Rational>(sz(d.k)))};
}

Jet2 approximate_jet(const SystemSpec& sys, const DataJet2& data) {
  sys.validate();
  const auto& d = sys.dims;
  check_data_shape(d, data);
  for (int A = 0; A < d.m; ++A) {
    if (data.a[sz(A)] != sys.p0[sz(A)]) throw Error(ErrorCode::input, "data value does not match p0 at the base point");
    if (data.a1[sz(A)] != sys.pprime0[sz(A)]) {
      throw Error(ErrorCode::input, "data first derivatives do not match pprime0 at the base point");
    }
  }
  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, sys.base_point());
  const int r = d.normal_count();
  Jet2 j = empty_jet(d);
  for (int A = 0; A < d.m; ++A) {
    j.u[sz(A)] = data.a[sz(A)];
    for (int L = 0; L < d.k; ++L) {
      j.u1[sz(A)][sz(L)] = data.a1[sz(A)][sz(L)];
      for (int G = 0; G < d.k; ++G) j.u2[sz(A)][sz(L)][sz(G)] = data.a2[sz(A)][sz(L)][sz(G)];
    }
    for (int a = 0; a < r; ++a) j.u1[sz(A)][sz(d.k + a)] = F.F(A, a);
  }
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int L = 0; L < d.k; ++L) {
        Rational v = F.Fx(A, a, L);
        for (int B = 0; B < d.m; ++B) {
          v += F.Fp(A, a, B) * data.a1[sz(B)][sz(L)];
          for (int G = 0; G < d.k; ++G) v += F.Fpd(A, a, B, G) * data.a2[sz(B)][sz(G)][sz(L)];
        }
        j.u2[sz(A)][sz(d.k + a)][sz(L)] = v;
        j.u2[sz(A)][sz(L)][sz(d.k + a)] = v;
      }
    }
  }
  // u^B_{b G} along the data, then the normal block from every ordered pair
  auto mixed = [&](int B, int b, int G) { return j.u2[sz(B)][sz(d.k + b)][sz(G)]; };
  std::vector<std::string> asymmetric;
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        Rational v = F.Fx(A, a, d.k + b);
        for (int B = 0; B < d.m; ++B) {
          v += F.Fp(A, a, B) * F.F(B, b);
          for (int G = 0; G < d.k; ++G) v += F.Fpd(A, a, B, G) * mixed(B, b, G);
        }
        if (b < a) {
          if (v != j.u2[sz(A)][sz(d.k + b)][sz(d.k + a)]) {
            asymmetric.push_back("u^" + std::to_string(A + 1) + "_" + std::to_string(d.k + b + 1) + "," +
                                 std::to_string(d.k + a + 1));
          }
          continue;
        }
        j.u2[sz(A)][sz(d.k + a)][sz(d.k + b)] = v;
        j.u2[sz(A)][sz(d.k + b)][sz(d.k + a)] = v;
      }
    }
  }
  if (!asymmetric.empty()) {
    auto witnesses = base_point_witnesses(calc);
    std::string msg = "second derivatives are not symmetric (";
    for (std::size_t i = 0; i < asymmetric.size(); ++i) msg += (i ? ", " : "") + asymmetric[i];
    msg += ")";
    if (!witnesses.empty()) {
      msg += "; compatibility fails at the base point:";
      for (const auto& w : witnesses) msg += " " + w.label() + " - swapped = " + to_string(w.difference) + ";";
      msg.pop_back();
    }
    throw IncompatibleError(msg, std::move(witnesses));
  }
  return j;
}

bool approximately_solvable(const SystemSpec& sys) {
  const auto& d = sys.dims;
  DataJet2 data;
  data.a = sys.p0;
  data.a1 = sys.pprime0;
  data.a2.assign(sz(d.m), std::vector<std::vector<Rational>>(sz(d.k), std::vector<Rational>(sz(d.k))));
  auto attempt = [&] {
    try {
      approximate_jet(sys, data);
      return true;
    } catch (const IncompatibleError&) {
      return false;
    }
  };
  if (!attempt()) return false;
  // the jet is affine in a_{LG}: the zero jet plus one symmetric basis element at a time covers all data
  for (int A = 0; A < d.m; ++A) {
    for (int L = 0; L < d.k; ++L) {
      for (int G = L; G < d.k; ++G) {
        data.a2[sz(A)][sz(L)][sz(G)] = data.a2[sz(A)][sz(G)][sz(L)] = 1;
        const bool ok = attempt();
        data.a2[sz(A)][sz(L)][sz(G)] = data.a2[sz(A)][sz(G)][sz(L)] = 0;
        if (!ok) return false;
      }
    }
  }
  return true;
}

SlopeCheck slope_noncharacteristic(const SystemSpec& sys, const Slope& slope, const SamplePoint& point) {
  const auto& d = sys.dims;
  const int r = d.normal_count();
  if (slope.c.size() != sz(r)) throw Error(ErrorCode::input, "slope must have n - k rows");
  for (const auto& row : slope.c) {
    if (row.size() != sz(d.k)) throw Error(ErrorCode::input, "slope rows must have k entries");
  }
  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, point);
  SlopeCheck out;
  out.V = RationalMatrix(sz(d.m * r), sz(d.m * r));
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int B = 0; B < d.m; ++B) {
        for (int b = 0; b < r; ++b) {
          Rational v = (A == B && a == b) ? 1 : 0;
          for (int L = 0; L < d.k; ++L) v += F.Fpd(A, a, B, L) * slope.at(b, L);
          out.V(sz(A * r + a), sz(B * r + b)) = v;
        }
      }
    }
  }
  out.determinant = determinant(out.V);
  out.noncharacteristic = sgn(out.determinant) != 0;
  return out;
}

SlopeCheck slope_noncharacteristic(const SystemSpec& sys, const Slope& slope) {
  return slope_noncharacteristic(sys, slope, sys.base_point());
}

Jet2 tilted_approximate_jet(const SystemSpec& sys, const Slope& slope, const DataJet2& data) {
  sys.validate();
  const auto& d = sys.dims;
  check_data_shape(d, data);
  const auto check = slope_noncharacteristic(sys, slope);
  if (!check.noncharacteristic) throw Error(ErrorCode::characteristic, "slope is characteristic: det V = 0");

  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, sys.base_point());
  const int r = d.normal_count();
  const auto& pd = sys.pprime0;
  for (int A = 0; A < d.m; ++A) {
    if (data.a[sz(A)] != sys.p0[sz(A)]) throw Error(ErrorCode::input, "data value does not match p0 at the base point");
    for (int L = 0; L < d.k; ++L) {
      Rational expect = pd[sz(A)][sz(L)];
      for (int a = 0; a < r; ++a) expect += F.F(A, a) * slope.at(a, L);
      if (data.a1[sz(A)][sz(L)] != expect) {
        throw Error(ErrorCode::input, "data first derivatives do not match pprime0 + F c on the tilted plane");
      }
    }
  }

  // unknowns: u_{LG} (L <= G), u_{aL}, u_{ab} (a <= b), per A
  std::vector<std::vector<int>> tang(sz(d.k), std::vector<int>(sz(d.k)));
  std::vector<std::vector<int>> norm(sz(r), std::vector<int>(sz(r)));
  int per = 0;
  for (int L = 0; L < d.k; ++L) {
    for (int G = L; G < d.k; ++G) tang[sz(L)][sz(G)] = tang[sz(G)][sz(L)] = per++;
  }
  const int mixed_base = per;
  per += r * d.k;
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) norm[sz(a)][sz(b)] = norm[sz(b)][sz(a)] = per++;
  }
  auto T = [&](int A, int L, int G) { return sz(A * per + tang[sz(L)][sz(G)]); };
  auto Mx = [&](int A, int a, int L) { return sz(A * per + mixed_base + a * d.k + L); };
  auto N = [&](int A, int a, int b) { return sz(A * per + norm[sz(a)][sz(b)]); };

  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  std::vector<std::string> labels;
  const std::size_t unknowns = sz(d.m * per);
  auto new_row = [&](const std::string& label) -> std::vector<Rational>& {
    rows.emplace_back(unknowns);
    rhs.emplace_back(0);
    labels.push_back(label);
    return rows.back();
  };
  for (int A = 0; A < d.m; ++A) {
    for (int L = 0; L < d.k; ++L) {
      for (int G = L; G < d.k; ++G) {
        auto& row = new_row("tangential block u^" + std::to_string(A + 1) + "_" + std::to_string(L + 1) + "," +
                            std::to_string(G + 1));
        row[T(A, L, G)] += 1;
        for (int b = 0; b < r; ++b) row[Mx(A, b, L)] += slope.at(b, G);
        for (int a = 0; a < r; ++a) row[Mx(A, a, G)] += slope.at(a, L);
        for (int a = 0; a < r; ++a) {
          for (int b = 0; b < r; ++b) row[N(A, a, b)] += slope.at(a, L) * slope.at(b, G);
        }
        rhs.back() = data.a2[sz(A)][sz(L)][sz(G)];
      }
    }
  }
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int L = 0; L < d.k; ++L) {
        auto& row = new_row("mixed block u^" + std::to_string(A + 1) + "_" + std::to_string(d.k + a + 1) + "," +
                            std::to_string(L + 1));
        row[Mx(A, a, L)] += 1;
        Rational v = F.Fx(A, a, L);
        for (int B = 0; B < d.m; ++B) {
          v += F.Fp(A, a, B) * pd[sz(B)][sz(L)];
          for (int G = 0; G < d.k; ++G) row[T(B, G, L)] -= F.Fpd(A, a, B, G);
        }
        rhs.back() = v;
      }
    }
  }
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        auto& row = new_row("normal block u^" + std::to_string(A + 1) + "_" + std::to_string(d.k + a + 1) + "," +
                            std::to_string(d.k + b + 1));
        row[N(A, a, b)] += 1;
        Rational v = F.Fx(A, a, d.k + b);
        for (int B = 0; B < d.m; ++B) {
          v += F.Fp(A, a, B) * F.F(B, b);
          for (int G = 0; G < d.k; ++G) {
            Rational inner = F.Fx(B, b, G);
            for (int C = 0; C < d.m; ++C) {
              inner += F.Fp(B, b, C) * pd[sz(C)][sz(G)];
              for (int O = 0; O < d.k; ++O) row[T(C, O, G)] -= F.Fpd(A, a, B, G) * F.Fpd(B, b, C, O);
            }
            v += F.Fpd(A, a, B, G) * inner;
          }
        }
        rhs.back() = v;
      }
    }
  }
  const auto sol = solve_linear(RationalMatrix::from_rows(rows, unknowns), rhs);
  if (sol.status == LinearSolveResult::Status::inconsistent) {
    const std::string block = sol.inconsistent_row ? labels[*sol.inconsistent_row] : std::string("unknown block");
    throw Error(ErrorCode::unsolvable, "tilted jet equations are inconsistent at " + block);
  }
  if (sol.status == LinearSolveResult::Status::underdetermined) {
    throw Error(ErrorCode::unsolvable, "tilted jet equations are not uniquely solvable for this slope");
  }

  Jet2 j = empty_jet(d);
  for (int A = 0; A < d.m; ++A) {
    j.u[sz(A)] = data.a[sz(A)];
    for (int L = 0; L < d.k; ++L) j.u1[sz(A)][sz(L)] = pd[sz(A)][sz(L)];
    for (int a = 0; a < r; ++a) j.u1[sz(A)][sz(d.k + a)] = F.F(A, a);
    for (int L = 0; L < d.k; ++L) {
      for (int G = 0; G < d.k; ++G) j.u2[sz(A)][sz(L)][sz(G)] = sol.solution[T(A, L, G)];
    }
    for (int a = 0; a < r; ++a) {
      for (int L = 0; L < d.k; ++L) {
        j.u2[sz(A)][sz(d.k + a)][sz(L)] = j.u2[sz(A)][sz(L)][sz(d.k + a)] = sol.solution[Mx(A, a, L)];
      }
      for (int b = 0; b < r; ++b) j.u2[sz(A)][sz(d.k + a)][sz(d.k + b)] = sol.solution[N(A, a, b)];
    }
  }
  return j;
}

void check_data(const SystemSpec& sys, const CauchyData& data) {
  const auto& d = sys.dims;
  if (data.a.size() != sz(d.m)) throw Error(ErrorCode::input, "data needs one series per unknown");
  for (const auto& s : data.a) {
    if (s.arity() != sz(d.k)) throw Error(ErrorCode::input, "data series must have arity k");
  }
  const auto j = DataJet2::from(data);
  for (int A = 0; A < d.m; ++A) {
    if (j.a[sz(A)] != sys.p0[sz(A)]) {
      throw Error(ErrorCode::input, "data a^" + std::to_string(A + 1) + " does not start at p0");
    }
    if (j.a1[sz(A)] != sys.pprime0[sz(A)]) {
      throw Error(ErrorCode::input, "first derivatives of a^" + std::to_string(A + 1) + " do not match pprime0");
    }
  }
}

SolutionSeries solve(const SystemSpec& sys, const CauchyData& data, int order) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be at least 1");
  sys.validate();
  check_data(sys, data);
  if (data.order() < order) throw Error(ErrorCode::input, "data series order is below the requested order");
  const auto& d = sys.dims;
  const int r = d.normal_count();
  const std::size_t n = sz(d.n);
  {
    const SystemCalculus calc(sys);
    auto witnesses = base_point_witnesses(calc);
    if (!witnesses.empty()) {
      std::string msg = "system is not compatible at the base point:";
      for (const auto& w : witnesses) msg += " " + w.label() + " - swapped = " + to_string(w.difference) + ";";
      msg.pop_back();
      throw IncompatibleError(msg, std::move(witnesses));
    }
  }

  SolutionSeries sol{d, order, {}};
  std::vector<std::size_t> tangential(sz(d.k));
  for (int L = 0; L < d.k; ++L) tangential[sz(L)] = sz(L);
  for (const auto& a : data.a) sol.u.push_back(embed(a.truncated(order), n, tangential));

  for (int layer = 1; layer <= order; ++layer) {
    const auto env = solution_env(sys, sol.u, order - 1);
    std::vector<TruncatedSeries> rhs;
    for (int A = 0; A < d.m; ++A) {
      for (int a = 0; a < r; ++a) rhs.push_back(evaluate_guarded(sys.rhs(A, a), env));
    }
    const auto normals = exponent_vectors(r, layer);
    for (int tdeg = 0; tdeg <= order - layer; ++tdeg) {
      for (const auto& te : exponent_vectors(d.k, tdeg)) {
        for (const auto& ne : normals) {
          std::vector<int> e(te);
          e.insert(e.end(), ne.begin(), ne.end());
          const MultiIndex I(e);
          int a = 0;
          while (ne[sz(a)] == 0) ++a;
          const MultiIndex J = I.shifted(sz(d.k + a), -1);
          for (int A = 0; A < d.m; ++A) {
            const Rational c = rhs[sz(A * r + a)].coefficient(J) / ne[sz(a)];
            sol.u[sz(A)].set_coefficient(I, c);
          }
        }
      }
    }
  }

  const auto res = residual(sys, sol, data);
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      const auto& s = res.equations[sz(A * r + a)];
      if (s.is_zero()) continue;
      const auto& [mono, value] = *s.terms().begin();
      std::string where;
      for (std::size_t i = 0; i < mono.arity(); ++i) {
        if (mono[i] == 0) continue;
        where += (where.empty() ? "" : "*") + std::string("y") + std::to_string(i + 1);
        if (mono[i] > 1) where += "^" + std::to_string(mono[i]);
      }
      if (where.empty()) where = "1";
      throw ResidualError("residual of u^" + std::to_string(A + 1) + "_" + std::to_string(d.k + a + 1) +
                              " = F has coefficient " + to_string(value) + " at " + where +
                              " (compatibility fails away from the base point)",
                          A + 1, d.k + a + 1, mono, value);
    }
  }
  return sol;
}

bool Residual::clean() const {
  return std::all_of(equations.begin(), equations.end(), [](const auto& s) { return s.is_zero(); }) &&
         std::all_of(data.begin(), data.end(), [](const auto& s) { return s.is_zero(); });
}

std::optional<int> Residual::lowest_degree() const {
  std::optional<int> best;
  for (const auto* group : {&equations, &data}) {
    for (const auto& s : *group) {
      if (s.is_zero()) continue;
      const int deg = s.lowest_degree();
      if (!best || deg < *best) best = deg;
    }
  }
  return best;
}

Residual residual(const SystemSpec& sys, const SolutionSeries& u, const CauchyData& data) {
  const auto& d = sys.dims;
  if (u.u.size() != sz(d.m) || data.a.size() != sz(d.m)) throw Error(ErrorCode::arity_mismatch, "unknown count");
  for (const auto& s : u.u) {
    if (s.arity() != sz(d.n)) throw Error(ErrorCode::arity_mismatch, "solution series must have arity n");
  }
  const int order = std::min(u.order, u.u.empty() ? 0 : u.u.front().order());
  Residual res;
  const auto env = solution_env(sys, u.u, order - 1);
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < d.normal_count(); ++a) {
      const auto lhs = derivative(u.u[sz(A)], sz(d.k + a)).truncated(order - 1);
      res.equations.push_back(lhs - evaluate_guarded(sys.rhs(A, a), env));
    }
  }
  const auto nv = normal_vars(d);
  for (int A = 0; A < d.m; ++A) {
    const int o = std::min(order, data.a[sz(A)].order());
    res.data.push_back(restrict_to_zero(u.u[sz(A)], nv).truncated(o) - data.a[sz(A)].truncated(o));
  }
  return res;
}

SystemSpec tilt_system(const SystemSpec& sys, const Slope& slope) {
  sys.validate();
  const auto& d = sys.dims;
  const int r = d.normal_count();
  const auto check = slope_noncharacteristic(sys, slope);
  if (!check.noncharacteristic) throw Error(ErrorCode::characteristic, "slope is characteristic: det V = 0");

  std::map<VarRef, Expression> pd_zero;
  for (int B = 0; B < d.m; ++B) {
    for (int L = 0; L < d.k; ++L) pd_zero[VarRef::pd(B + 1, L + 1)] = Expression::constant(0);
  }
  // F = g + h^{L}_{B} pd[B][L] with g, h free of pd
  std::vector<Expression> g;
  std::vector<std::vector<Expression>> h;  // [(A, a)][B * k + L]
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      const Expression& f = sys.rhs(A, a);
      std::vector<Expression> hs;
      for (int B = 0; B < d.m; ++B) {
        for (int L = 0; L < d.k; ++L) {
          const auto dh = differentiate(f, VarRef::pd(B + 1, L + 1));
          for (const auto& [v, zero] : pd_zero) {
            const auto second = differentiate(dh, v);
            const bool affine = contains_primitive(second) ? !depends_on(dh, v) : identically_zero(second, d);
            if (!affine) {
              throw Error(ErrorCode::invalid_argument,
                          "tilting needs F affine in the pd variables; " + to_string(f) + " is not");
            }
          }
          hs.push_back(substitute(dh, pd_zero));
        }
      }
      g.push_back(substitute(f, pd_zero));
      h.push_back(std::move(hs));
    }
  }

  // M u~_b = g + h pd~ with M = delta + h c
  const std::size_t size = sz(d.m * r);
  std::vector<std::vector<Expression>> M(size, std::vector<Expression>(size, Expression::constant(0)));
  std::vector<Expression> R(size);
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      const std::size_t row = sz(A * r + a);
      Expression rhs = g[row];
      for (int B = 0; B < d.m; ++B) {
        for (int L = 0; L < d.k; ++L) {
          const Expression& coef = h[row][sz(B * d.k + L)];
          rhs = make_sum(rhs, make_product(coef, Expression::variable(VarRef::pd(B + 1, L + 1))));
          for (int b = 0; b < r; ++b) {
            auto& cell = M[row][sz(B * r + b)];
            cell = make_sum(cell, make_product(coef, Expression::constant(slope.at(b, L))));
          }
        }
      }
      M[row][row] = make_sum(M[row][row], Expression::constant(1));
      R[row] = rhs;
    }
  }
  const Expression det = symbolic_determinant(M);

  // x^a = x~^a + c^a_L (x~^L - x0^L)
  std::map<VarRef, Expression> shift;
  for (int a = 0; a < r; ++a) {
    Expression e = Expression::variable(VarRef::x(d.k + a + 1));
    for (int L = 0; L < d.k; ++L) {
      if (sgn(slope.at(a, L)) == 0) continue;
      const auto offset = make_difference(Expression::variable(VarRef::x(L + 1)), Expression::constant(sys.x0[sz(L)]));
      e = make_sum(e, make_product(Expression::constant(slope.at(a, L)), offset));
    }
    shift[VarRef::x(d.k + a + 1)] = e;
  }

  SystemSpec out;
  out.dims = d;
  out.x0 = sys.x0;
  out.p0 = sys.p0;
  const SystemCalculus calc(sys);
  const DerivativeValues F(calc, sys.base_point());
  out.pprime0 = sys.pprime0;
  for (int A = 0; A < d.m; ++A) {
    for (int L = 0; L < d.k; ++L) {
      for (int a = 0; a < r; ++a) out.pprime0[sz(A)][sz(L)] += F.F(A, a) * slope.at(a, L);
    }
  }
  for (int A = 0; A < d.m; ++A) {
    std::vector<Expression> row;
    for (int a = 0; a < r; ++a) {
      auto Mc = M;
      for (std::size_t i = 0; i < size; ++i) Mc[i][sz(A * r + a)] = R[i];
      row.push_back(substitute(make_quotient(symbolic_determinant(Mc), det), shift));
    }
    out.F.push_back(std::move(row));
  }
  for (const auto& gd : sys.guards) out.guards.push_back(substitute(gd, shift));
  if (!det.is_constant()) out.guards.push_back(substitute(det, shift));
  return out;
}

SolutionSeries pullback(const SolutionSeries& tilted, const Slope& slope) {
  const auto& d = tilted.dims;
  const std::size_t n = sz(d.n);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (int i = 0; i < d.n; ++i) rows[sz(i)][sz(i)] = 1;
  for (int a = 0; a < d.normal_count(); ++a) {
    for (int L = 0; L < d.k; ++L) rows[sz(d.k + a)][sz(L)] = -slope.at(a, L);
  }
  SolutionSeries out{d, tilted.order, {}};
  for (const auto& s : tilted.u) out.u.push_back(linear_substitute(s, rows, n));
  return out;
}

CauchyData restrict_to_plane(const SolutionSeries& u, const Slope& slope) {
  const auto& d = u.dims;
  std::vector<std::vector<Rational>> rows(sz(d.n), std::vector<Rational>(sz(d.k)));
  for (int L = 0; L < d.k; ++L) rows[sz(L)][sz(L)] = 1;
  for (int a = 0; a < d.normal_count(); ++a) {
    for (int L = 0; L < d.k; ++L) rows[sz(d.k + a)][sz(L)] = slope.at(a, L);
  }
  CauchyData data;
  for (const auto& s : u.u) data.a.push_back(linear_substitute(s, rows, sz(d.k)));
  return data;
}

}  // namespace ck
