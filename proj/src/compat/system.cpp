#include "ck/system.hpp"

#include "ck/error.hpp"

namespace ck {

std::map<VarRef, Rational> SamplePoint::env() const {
  std::map<VarRef, Rational> out;
  for (std::size_t i = 0; i < x.size(); ++i) out[VarRef::x(static_cast<int>(i) + 1)] = x[i];
  for (std::size_t A = 0; A < p.size(); ++A) out[VarRef::p(static_cast<int>(A) + 1)] = p[A];
  for (std::size_t A = 0; A < pd.size(); ++A) {
    for (std::size_t L = 0; L < pd[A].size(); ++L) {
      out[VarRef::pd(static_cast<int>(A) + 1, static_cast<int>(L) + 1)] = pd[A][L];
    }
  }
  return out;
}

bool SystemSpec::has_primitives() const {
  for (const auto& row : F) {
    for (const auto& e : row) {
      if (contains_primitive(e)) return true;
    }
  }
  for (const auto& g : guards) {
    if (contains_primitive(g)) return true;
  }
  return false;
}

void SystemSpec::validate() const {
  const auto& d = dims;
  auto bad = [](const std::string& why) { throw Error(ErrorCode::input, why); };
  if (d.n < 1 || d.m < 1 || d.k < 1 || d.k >= d.n) bad("dimensions must satisfy n, m >= 1 and 1 <= k < n");
  if (x0.size() != static_cast<std::size_t>(d.n)) bad("x0 must have n entries");
  if (p0.size() != static_cast<std::size_t>(d.m)) bad("p0 must have m entries");
  if (pprime0.size() != static_cast<std::size_t>(d.m)) bad("pprime0 must have m rows");
  for (const auto& row : pprime0) {
    if (row.size() != static_cast<std::size_t>(d.k)) bad("pprime0 rows must have k entries");
  }
  if (F.size() != static_cast<std::size_t>(d.m)) bad("F must have m rows");
  for (const auto& row : F) {
    if (row.size() != static_cast<std::size_t>(d.normal_count())) bad("every F row needs n - k expressions");
    for (const auto& e : row) {
      for (const auto& v : variables(e)) check_bounds(v, d);
    }
  }
  for (const auto& g : guards) {
    for (const auto& v : variables(g)) check_bounds(v, d);
  }
  check_guards(*this, base_point());
}

void check_guards(const SystemSpec& sys, const SamplePoint& point) {
  const auto env = point.env();
  for (const auto& g : sys.guards) {
    Rational v;
    try {
      v = evaluate_at(g, env);
    } catch (const Error& e) {
      throw Error(ErrorCode::guard_violation, "guard " + to_string(g) + " cannot be evaluated: " + e.what());
    }
    if (sgn(v) == 0) throw Error(ErrorCode::guard_violation, "guard " + to_string(g) + " vanishes at the point");
  }
}

SystemCalculus::SystemCalculus(const SystemSpec& sys) : sys_(&sys) {
  const auto& d = sys.dims;
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < d.normal_count(); ++a) {
      const Expression& f = sys.rhs(A, a);
      std::vector<Expression> dx, dp, dpd;
      for (int i = 0; i < d.n; ++i) dx.push_back(differentiate(f, VarRef::x(i + 1)));
      for (int B = 0; B < d.m; ++B) dp.push_back(differentiate(f, VarRef::p(B + 1)));
      for (int B = 0; B < d.m; ++B) {
        for (int L = 0; L < d.k; ++L) dpd.push_back(differentiate(f, VarRef::pd(B + 1, L + 1)));
      }
      dx_.push_back(std::move(dx));
      dp_.push_back(std::move(dp));
      dpd_.push_back(std::move(dpd));
    }
  }
}

DerivativeValues::DerivativeValues(const SystemCalculus& calc, const SamplePoint& point)
    : dims_(calc.system().dims) {
  check_guards(calc.system(), point);
  const auto env = point.env();
  auto eval = [&](const Expression& e) {
    try {
      return evaluate_at(e, env);
    } catch (const Error& err) {
      throw Error(ErrorCode::guard_violation, std::string("cannot evaluate at the point: ") + err.what());
    }
  };
  const auto& d = dims_;
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < d.normal_count(); ++a) {
      f_.push_back(eval(calc.F(A, a)));
      for (int i = 0; i < d.n; ++i) dx_.push_back(eval(calc.Fx(A, a, i)));
      for (int B = 0; B < d.m; ++B) dp_.push_back(eval(calc.Fp(A, a, B)));
      for (int B = 0; B < d.m; ++B) {
        for (int L = 0; L < d.k; ++L) dpd_.push_back(eval(calc.Fpd(A, a, B, L)));
      }
    }
  }
}

}  // namespace ck
