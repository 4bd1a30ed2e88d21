#include "ck/compat.hpp"

#include <random>
#include <set>
#include <stdexcept>

#include "ck/error.hpp"
#include "ck/polynomial.hpp"

namespace ck {

namespace {

// Phi and Psi from any source of F-derivatives; T is Rational, RationalFunction or TruncatedSeries.
template <class T, class Source>
void assemble(const Dims& d, const Source& s, std::vector<T>& phi, std::vector<T>& psi) {
  const int r = d.normal_count();
  phi.clear();
  psi.clear();
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        T acc = s.Fx(A, a, d.k + b);
        for (int B = 0; B < d.m; ++B) acc = acc + s.Fp(A, a, B) * s.F(B, b);
        for (int B = 0; B < d.m; ++B) {
          for (int G = 0; G < d.k; ++G) {
            T inner = s.Fx(B, b, G);
            for (int C = 0; C < d.m; ++C) inner = inner + s.Fp(B, b, C) * s.pd(C, G);
            acc = acc + s.Fpd(A, a, B, G) * inner;
          }
        }
        phi.push_back(std::move(acc));
      }
    }
  }
  for (int A = 0; A < d.m; ++A) {
    for (int G = 0; G < d.k; ++G) {
      for (int L = 0; L < d.k; ++L) {
        for (int a = 0; a < r; ++a) {
          for (int b = 0; b < r; ++b) {
            for (int C = 0; C < d.m; ++C) {
              T acc = s.zero();
              for (int B = 0; B < d.m; ++B) {
                acc = acc + s.Fpd(A, a, B, G) * s.Fpd(B, b, C, L) + s.Fpd(A, a, B, L) * s.Fpd(B, b, C, G);
              }
              psi.push_back(std::move(acc));
            }
          }
        }
      }
    }
  }
}

struct ValueSource {
  const DerivativeValues& v;
  const SamplePoint& point;
  Rational F(int A, int a) const { return v.F(A, a); }
  Rational Fx(int A, int a, int i) const { return v.Fx(A, a, i); }
  Rational Fp(int A, int a, int B) const { return v.Fp(A, a, B); }
  Rational Fpd(int A, int a, int B, int L) const { return v.Fpd(A, a, B, L); }
  Rational pd(int C, int G) const { return point.pd[static_cast<std::size_t>(C)][static_cast<std::size_t>(G)]; }
  Rational zero() const { return 0; }
};

// Converts every derivative of F with a caller-supplied map Expression -> T.
template <class T>
struct ConvertedSource {
  Dims d;
  std::vector<T> f, dx, dp, dpd, pds;
  T z;

  std::size_t idx(int A, int a) const { return static_cast<std::size_t>(A * d.normal_count() + a); }
  const T& F(int A, int a) const { return f[idx(A, a)]; }
  const T& Fx(int A, int a, int i) const { return dx[idx(A, a) * d.n + i]; }
  const T& Fp(int A, int a, int B) const { return dp[idx(A, a) * d.m + B]; }
  const T& Fpd(int A, int a, int B, int L) const { return dpd[(idx(A, a) * d.m + B) * d.k + L]; }
  const T& pd(int C, int G) const { return pds[static_cast<std::size_t>(C * d.k + G)]; }
  const T& zero() const { return z; }

  template <class Convert>
  static ConvertedSource build(const SystemCalculus& calc, Convert&& conv) {
    ConvertedSource s;
    s.d = calc.system().dims;
    const auto& d = s.d;
    for (int A = 0; A < d.m; ++A) {
      for (int a = 0; a < d.normal_count(); ++a) {
        s.f.push_back(conv(calc.F(A, a)));
        for (int i = 0; i < d.n; ++i) s.dx.push_back(conv(calc.Fx(A, a, i)));
        for (int B = 0; B < d.m; ++B) s.dp.push_back(conv(calc.Fp(A, a, B)));
        for (int B = 0; B < d.m; ++B) {
          for (int L = 0; L < d.k; ++L) s.dpd.push_back(conv(calc.Fpd(A, a, B, L)));
        }
      }
    }
    for (int C = 0; C < d.m; ++C) {
      for (int G = 0; G < d.k; ++G) s.pds.push_back(conv(Expression::variable(VarRef::pd(C + 1, G + 1))));
    }
    s.z = conv(Expression::constant(0));
    return s;
  }
};

// Visits every alpha < beta pair of (1.4) and (1.5), handing the two flat positions to `fn`.
template <class Fn>
void for_each_swap(const CompatTensors& shape, Fn&& fn) {
  const auto& d = shape.dims;
  const int r = d.normal_count();
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        fn(std::string("phi"), std::vector<int>{A + 1, d.k + a + 1, d.k + b + 1}, shape.phi_index(A, a, b),
           shape.phi_index(A, b, a));
      }
    }
  }
  for (int A = 0; A < d.m; ++A) {
    for (int G = 0; G < d.k; ++G) {
      for (int L = 0; L < d.k; ++L) {
        for (int a = 0; a < r; ++a) {
          for (int b = a + 1; b < r; ++b) {
            for (int C = 0; C < d.m; ++C) {
              fn(std::string("psi"), std::vector<int>{A + 1, G + 1, L + 1, d.k + a + 1, d.k + b + 1, C + 1},
                 shape.psi_index(A, G, L, a, b, C), shape.psi_index(A, G, L, b, a, C));
            }
          }
        }
      }
    }
  }
}

std::string polynomial_text(const Polynomial& p, const Dims& dims) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [mono, coeff] = *it;
    Rational c = coeff;
    if (first) {
      if (sgn(c) < 0) out += "-";
    } else {
      out += sgn(c) < 0 ? " - " : " + ";
    }
    c = abs(c);
    first = false;
    std::string factors;
    for (std::size_t i = 0; i < mono.arity(); ++i) {
      if (mono[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += to_string(var_from_flat(i, dims));
      if (mono[i] > 1) factors += "^" + std::to_string(mono[i]);
    }
    if (factors.empty()) {
      out += to_string(c);
    } else if (c == 1) {
      out += factors;
    } else {
      out += to_string(c) + "*" + factors;
    }
  }
  return out;
}

Rational small_offset(std::mt19937_64& gen) {
  const long num = static_cast<long>(gen() % 7) - 3;
  const long den = static_cast<long>(gen() % 4) + 1;
  return make_rational(num, den);
}

SamplePoint perturbed(const SamplePoint& base, std::mt19937_64& gen) {
  SamplePoint pt = base;
  for (auto& v : pt.x) v += small_offset(gen);
  for (auto& v : pt.p) v += small_offset(gen);
  for (auto& row : pt.pd) {
    for (auto& v : row) v += small_offset(gen);
  }
  return pt;
}

constexpr int kSampleRetries = 64;
constexpr std::size_t kGermMonomialBudget = 20000;

std::size_t monomial_count(std::size_t arity, int order) {
  // C(arity + order, order), saturating
  std::size_t c = 1;
  for (int i = 1; i <= order; ++i) {
    c = c * (arity + static_cast<std::size_t>(i)) / static_cast<std::size_t>(i);
    if (c > kGermMonomialBudget * 16) return c;
  }
  return c;
}

std::set<VarRef> system_variables(const SystemSpec& sys) {
  std::set<VarRef> vars;
  for (const auto& row : sys.F) {
    for (const auto& e : row) {
      for (const auto& v : variables(e)) vars.insert(v);
    }
  }
  // p^C_Gamma enters Phi through F_{beta C} p^C_Gamma
  std::set<VarRef> extra;
  for (const auto& v : vars) {
    if (v.kind == VarKind::p) {
      for (int G = 1; G <= sys.dims.k; ++G) extra.insert(VarRef::pd(v.a, G));
    }
  }
  vars.insert(extra.begin(), extra.end());
  return vars;
}

Rational base_value(const SamplePoint& base, const VarRef& v) {
  switch (v.kind) {
    case VarKind::x: return base.x[static_cast<std::size_t>(v.a - 1)];
    case VarKind::p: return base.p[static_cast<std::size_t>(v.a - 1)];
    case VarKind::pd: return base.pd[static_cast<std::size_t>(v.a - 1)][static_cast<std::size_t>(v.b - 1)];
    case VarKind::t: break;
  }
  throw Error(ErrorCode::invalid_argument, "t has no base value");
}

SymbolicVerdict rational_identity(const SystemCalculus& calc, const CompatTensors& shape) {
  const Dims& d = calc.system().dims;
  auto src = ConvertedSource<RationalFunction>::build(calc, [&](const Expression& e) {
    return *to_rational_function(e, d);
  });
  std::vector<RationalFunction> phi, psi;
  assemble(d, src, phi, psi);
  SymbolicVerdict verdict;
  verdict.method = "rational-identity";
  for_each_swap(shape, [&](const std::string& tensor, std::vector<int> indices, std::size_t i, std::size_t j) {
    const auto& vec = tensor == "phi" ? phi : psi;
    const RationalFunction diff = vec[i] - vec[j];
    if (diff.is_zero()) return;
    Witness w;
    w.tensor = tensor;
    w.indices = std::move(indices);
    w.symbolic = polynomial_text(diff.num, d);
    if (!diff.den.is_constant() || diff.den.constant_term() != 1) w.symbolic = "(" + w.symbolic + ")/(" + polynomial_text(diff.den, d) + ")";
    verdict.witnesses.push_back(std::move(w));
  });
  verdict.holds = verdict.witnesses.empty();
  return verdict;
}

SymbolicVerdict germ_identity(const SystemCalculus& calc, const CompatTensors& shape, int order) {
  const SystemSpec& sys = calc.system();
  const auto vars = system_variables(sys);
  const std::size_t arity = vars.size();
  int q = 2 * order;
  while (q > 1 && monomial_count(arity, q) > kGermMonomialBudget) --q;

  SeriesEnv env{arity, q, {}};
  const SamplePoint base = sys.base_point();
  std::size_t j = 0;
  for (const auto& v : vars) env.bindings[v] = TruncatedSeries::variable(arity, q, j++, base_value(base, v));
  auto conv = [&](const Expression& e) {
    if (e.kind() == NodeKind::variable && !env.bindings.count(e.var())) {
      return TruncatedSeries::constant(arity, q, base_value(base, e.var()));
    }
    return evaluate(e, env);
  };
  auto src = ConvertedSource<TruncatedSeries>::build(calc, conv);
  std::vector<TruncatedSeries> phi, psi;
  assemble(sys.dims, src, phi, psi);

  SymbolicVerdict verdict;
  verdict.method = "germ-at-base-point";
  verdict.order = q;
  for_each_swap(shape, [&](const std::string& tensor, std::vector<int> indices, std::size_t i, std::size_t k) {
    const auto& vec = tensor == "phi" ? phi : psi;
    const TruncatedSeries diff = vec[i] - vec[k];
    if (diff.is_zero()) return;
    Witness w;
    w.tensor = tensor;
    w.indices = std::move(indices);
    w.symbolic = "germ of order " + std::to_string(q) + " has lowest nonzero degree " +
                 std::to_string(diff.lowest_degree());
    verdict.witnesses.push_back(std::move(w));
  });
  verdict.holds = verdict.witnesses.empty();
  return verdict;
}

bool rational_system(const SystemCalculus& calc) {
  const auto& d = calc.system().dims;
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < d.normal_count(); ++a) {
      if (contains_primitive(calc.F(A, a))) return false;
    }
  }
  return true;
}

}  // namespace

std::string Witness::label() const {
  std::string s = tensor == "phi" ? "Phi^" : "Psi^";
  auto join = [&](std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) out += (i > from ? "," : "") + std::to_string(indices[i]);
    return out;
  };
  if (tensor == "phi") {
    s += join(0, 1) + "_" + join(1, 3);
  } else {
    s += join(0, 3) + "_" + join(3, 6);
  }
  return s;
}

CompatTensors phi_psi(const SystemCalculus& calc, const SamplePoint& point) {
  const DerivativeValues values(calc, point);
  CompatTensors t;
  t.dims = calc.system().dims;
  assemble(t.dims, ValueSource{values, point}, t.phi, t.psi);
  const auto& d = t.dims;
  for (int A = 0; A < d.m; ++A) {
    for (int G = 0; G < d.k; ++G) {
      for (int L = 0; L < d.k; ++L) {
        for (int a = 0; a < d.normal_count(); ++a) {
          for (int b = 0; b < d.normal_count(); ++b) {
            for (int C = 0; C < d.m; ++C) {
              if (t.Psi(A, G, L, a, b, C) != t.Psi(A, L, G, a, b, C)) {
                throw std::logic_error("Psi lost its Gamma/Lambda symmetry");
              }
            }
          }
        }
      }
    }
  }
  return t;
}

CompatTensors phi_psi(const SystemSpec& sys, const SamplePoint& point) {
  const SystemCalculus calc(sys);
  return phi_psi(calc, point);
}

CompatReport check_compatibility(const SystemSpec& sys, const CompatOptions& options) {
  if (options.samples < 1) throw Error(ErrorCode::invalid_argument, "at least one sample is required");
  sys.validate();
  const SystemCalculus calc(sys);
  const bool rational = rational_system(calc);

  CompatReport report;
  report.dims = sys.dims;
  report.seed = options.seed;
  const SamplePoint base = sys.base_point();
  report.points.push_back(base);
  report.tensors.push_back(phi_psi(calc, base));

  std::mt19937_64 gen(options.seed);
  for (int s = 1; s < options.samples; ++s) {
    bool found = false;
    for (int attempt = 0; attempt < kSampleRetries && !found; ++attempt) {
      SamplePoint pt = perturbed(base, gen);
      try {
        report.tensors.push_back(phi_psi(calc, pt));
        report.points.push_back(std::move(pt));
        found = true;
      } catch (const Error&) {
      }
    }
    if (!found) {
      if (!rational) break;
      throw Error(ErrorCode::guard_violation, "no admissible sample point found after " +
                                                  std::to_string(kSampleRetries) + " attempts");
    }
  }

  for (std::size_t pi = 0; pi < report.tensors.size(); ++pi) {
    const auto& t = report.tensors[pi];
    for_each_swap(t, [&](const std::string& tensor, std::vector<int> indices, std::size_t i, std::size_t j) {
      const auto& vec = tensor == "phi" ? t.phi : t.psi;
      if (vec[i] == vec[j]) return;
      report.witnesses.push_back(Witness{tensor, std::move(indices), pi, vec[i] - vec[j], {}});
    });
  }

  if (options.symbolic) {
    report.symbolic = rational ? rational_identity(calc, report.tensors.front())
                               : germ_identity(calc, report.tensors.front(), options.order);
  }
  return report;
}

LinearFieldSystem LinearFieldSystem::zero(const Dims& dims, std::vector<Rational> x0) {
  LinearFieldSystem lf{dims, std::move(x0), {}};
  lf.xi.assign(static_cast<std::size_t>(dims.m * dims.k * dims.normal_count() * dims.m), Expression::constant(0));
  return lf;
}

void LinearFieldSystem::validate() const {
  if (dims.n < 1 || dims.m < 1 || dims.k < 1 || dims.k >= dims.n) {
    throw Error(ErrorCode::input, "dimensions must satisfy n, m >= 1 and 1 <= k < n");
  }
  if (x0.size() != static_cast<std::size_t>(dims.n)) throw Error(ErrorCode::input, "x0 must have n entries");
  if (xi.size() != static_cast<std::size_t>(dims.m * dims.k * dims.normal_count() * dims.m)) {
    throw Error(ErrorCode::input, "wrong number of linear-field coefficients");
  }
  for (const auto& e : xi) {
    for (const auto& v : variables(e)) {
      check_bounds(v, dims);
      if (v.kind != VarKind::x) {
        throw Error(ErrorCode::input, "linear-field coefficient depends on " + to_string(v) + "; only x[i] allowed");
      }
    }
  }
}

SystemSpec from_linear_fields(const LinearFieldSystem& lf) {
  lf.validate();
  const auto& d = lf.dims;
  SystemSpec sys;
  sys.dims = d;
  sys.x0 = lf.x0;
  sys.p0.assign(static_cast<std::size_t>(d.m), Rational(0));
  sys.pprime0.assign(static_cast<std::size_t>(d.m), std::vector<Rational>(static_cast<std::size_t>(d.k), Rational(0)));
  for (int A = 0; A < d.m; ++A) {
    std::vector<Expression> row;
    for (int a = 0; a < d.normal_count(); ++a) {
      Expression acc = Expression::constant(0);
      for (int B = 0; B < d.m; ++B) {
        for (int L = 0; L < d.k; ++L) {
          const Expression& c = lf.coefficient(A, L, a, B);
          if (c.is_constant(0)) continue;
          acc = make_sum(acc, make_product(c, Expression::variable(VarRef::pd(B + 1, L + 1))));
        }
      }
      row.push_back(negate(acc));
    }
    sys.F.push_back(std::move(row));
  }
  return sys;
}

namespace {

bool identically_zero(const Expression& e, const LinearFieldSystem& lf) {
  if (e.is_constant()) return e.is_constant(0);
  if (auto f = to_rational_function(e, lf.dims)) return f->is_zero();
  const std::size_t arity = static_cast<std::size_t>(lf.dims.n);
  const int order = 8;
  SeriesEnv env{arity, order, {}};
  for (int i = 0; i < lf.dims.n; ++i) {
    env.bindings[VarRef::x(i + 1)] =
        TruncatedSeries::variable(arity, order, static_cast<std::size_t>(i), lf.x0[static_cast<std::size_t>(i)]);
  }
  return evaluate(e, env).is_zero();
}

}  // namespace

bool bracket_check(const LinearFieldSystem& lf) {
  lf.validate();
  const auto& d = lf.dims;
  const int r = d.normal_count();
  // component i of the vector field L^A_{aB}
  auto field = [&](int A, int a, int B, int i) -> Expression {
    if (i < d.k) return lf.coefficient(A, i, a, B);
    return Expression::constant(A == B && i == d.k + a ? 1 : 0);
  };
  auto dx = [](const Expression& e, int i) { return differentiate(e, VarRef::x(i + 1)); };

  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      for (int A = 0; A < d.m; ++A) {
        for (int C = 0; C < d.m; ++C) {
          // [L_a, L_b]^A_C = sum_B L^A_{aB} L^B_{bC} - L^A_{bB} L^B_{aC}
          std::vector<Expression> second(static_cast<std::size_t>(d.n * d.n), Expression::constant(0));
          std::vector<Expression> first(static_cast<std::size_t>(d.n), Expression::constant(0));
          for (int B = 0; B < d.m; ++B) {
            for (int i = 0; i < d.n; ++i) {
              const Expression xa = field(A, a, B, i), xb = field(A, b, B, i);
              for (int j = 0; j < d.n; ++j) {
                const Expression ya = field(B, a, C, j), yb = field(B, b, C, j);
                auto& s = second[static_cast<std::size_t>(std::min(i, j) * d.n + std::max(i, j))];
                s = make_sum(s, make_difference(make_product(xa, yb), make_product(xb, ya)));
                auto& f = first[static_cast<std::size_t>(j)];
                f = make_sum(f, make_difference(make_product(xa, dx(yb, i)), make_product(xb, dx(ya, i))));
              }
            }
          }
          for (const auto& e : second) {
            if (!identically_zero(e, lf)) return false;
          }
          for (const auto& e : first) {
            if (!identically_zero(e, lf)) return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace ck
