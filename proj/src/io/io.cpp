#include "ck/io.hpp"

#include <fstream>
#include <sstream>

#include "ck/error.hpp"

namespace ck::io {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::input, (where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing key \"" + key + "\"");
  return *it;
}

const Json* optional_member(const Json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

int int_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& where, std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) fail(where, "expected an array");
  if (size && j.size() != *size) fail(where, "expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
  return j;
}

std::vector<Rational> rational_vector(const Json& j, const std::string& where, std::optional<std::size_t> size = std::nullopt) {
  array(j, where, size);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from_json(j[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<Rational>> rational_matrix(const Json& j, const std::string& where, std::size_t rows, std::size_t cols) {
  array(j, where, rows);
  std::vector<std::vector<Rational>> out;
  for (std::size_t i = 0; i < rows; ++i) out.push_back(rational_vector(j[i], where + "/" + std::to_string(i), cols));
  return out;
}

Json vector_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(to_json(q));
  return out;
}

Json matrix_json(const std::vector<std::vector<Rational>>& m) {
  Json out = Json::array();
  for (const auto& row : m) out.push_back(vector_json(row));
  return out;
}

Expression expression_from_json(const Json& j, const std::string& where, const ParseOptions& options) {
  if (!j.is_string()) fail(where, "expected an expression string");
  try {
    return parse_expression(j.get<std::string>(), options);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

// Runs a reader and reports library errors raised on the parsed values as input errors at `where`.
template <class F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::input) throw;
    fail(where, e.what());
  }
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::input, path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::input, path + ": " + e.what());
  }
}

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) fail(where, "expected a rational as a string or an integer");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Json to_json(const TruncatedSeries& s) {
  Json terms = Json::array();
  for (const auto& [exps, c] : s.terms()) {
    terms.push_back({{"exp", exps.exponents()}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  }
  return {{"arity", s.arity()}, {"order", s.order()}, {"terms", terms}};
}

TruncatedSeries series_from_json(const Json& j, const std::string& where, std::size_t arity, int default_order) {
  if (j.is_string()) {
    const auto e = expression_from_json(j, where, ParseOptions{Dims{static_cast<int>(arity), 0, 0}, false});
    SeriesEnv env{arity, default_order, {}};
    for (std::size_t i = 0; i < arity; ++i) env.bindings[VarRef::x(static_cast<int>(i) + 1)] = TruncatedSeries::variable(arity, default_order, i);
    return guarded(where, [&] { return evaluate(e, env); });
  }
  const int a = int_from_json(member(j, "arity", where), where + "/arity");
  if (sz(a) != arity) fail(where + "/arity", "expected arity " + std::to_string(arity));
  const int order = int_from_json(member(j, "order", where), where + "/order");
  if (order < 0) fail(where + "/order", "order must be nonnegative");
  TruncatedSeries s(arity, order);
  const auto& terms = array(member(j, "terms", where), where + "/terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tw = where + "/terms/" + std::to_string(t);
    const auto& exp = array(member(terms[t], "exp", tw), tw + "/exp", arity);
    std::vector<int> e;
    for (std::size_t i = 0; i < arity; ++i) {
      e.push_back(int_from_json(exp[i], tw + "/exp/" + std::to_string(i)));
      if (e.back() < 0) fail(tw + "/exp/" + std::to_string(i), "negative exponent");
    }
    const auto& num = member(terms[t], "num", tw);
    const auto& den = member(terms[t], "den", tw);
    const auto text = [&](const Json& v, const std::string& w) {
      if (v.is_number_integer()) return std::to_string(v.get<long>());
      if (!v.is_string()) fail(w, "expected an integer string");
      return v.get<std::string>();
    };
    const Rational c = rational_from_json(text(num, tw + "/num") + "/" + text(den, tw + "/den"), tw);
    MultiIndex idx(std::move(e));
    if (idx.degree() > order) fail(tw + "/exp", "term above the series order");
    s.add_to_coefficient(idx, c);
  }
  return s;
}

Json to_json(const SystemSpec& sys) {
  Json F = Json::array();
  for (int A = 0; A < sys.dims.m; ++A) {
    for (int a = 0; a < sys.dims.normal_count(); ++a) {
      F.push_back({{"A", A + 1}, {"alpha", sys.dims.k + a + 1}, {"expr", to_string(sys.rhs(A, a))}});
    }
  }
  Json guards = Json::array();
  for (const auto& g : sys.guards) guards.push_back(to_string(g));
  return {{"n", sys.dims.n}, {"k", sys.dims.k}, {"m", sys.dims.m}, {"x0", vector_json(sys.x0)},
          {"p0", vector_json(sys.p0)}, {"pprime0", matrix_json(sys.pprime0)}, {"F", F}, {"guards", guards}};
}

SystemSpec system_from_json(const Json& j) {
  SystemSpec sys;
  sys.dims.n = int_from_json(member(j, "n", ""), "/n");
  sys.dims.k = int_from_json(member(j, "k", ""), "/k");
  sys.dims.m = int_from_json(member(j, "m", ""), "/m");
  const auto& d = sys.dims;
  if (d.k < 1 || d.k >= d.n || d.m < 1) fail("", "need 1 <= k < n and m >= 1");
  sys.x0 = rational_vector(member(j, "x0", ""), "/x0", sz(d.n));
  sys.p0 = rational_vector(member(j, "p0", ""), "/p0", sz(d.m));
  sys.pprime0 = rational_matrix(member(j, "pprime0", ""), "/pprime0", sz(d.m), sz(d.k));

  sys.F.assign(sz(d.m), std::vector<Expression>(sz(d.normal_count())));
  std::vector<std::vector<bool>> seen(sz(d.m), std::vector<bool>(sz(d.normal_count()), false));
  const auto& F = array(member(j, "F", ""), "/F");
  for (std::size_t i = 0; i < F.size(); ++i) {
    const std::string w = "/F/" + std::to_string(i);
    const int A = int_from_json(member(F[i], "A", w), w + "/A");
    const int alpha = int_from_json(member(F[i], "alpha", w), w + "/alpha");
    if (A < 1 || A > d.m) fail(w + "/A", "A must lie in 1.." + std::to_string(d.m));
    if (alpha <= d.k || alpha > d.n) fail(w + "/alpha", "alpha must lie in " + std::to_string(d.k + 1) + ".." + std::to_string(d.n));
    if (seen[sz(A - 1)][sz(alpha - d.k - 1)]) fail(w, "duplicate right-hand side");
    seen[sz(A - 1)][sz(alpha - d.k - 1)] = true;
    sys.F[sz(A - 1)][sz(alpha - d.k - 1)] = expression_from_json(member(F[i], "expr", w), w + "/expr", ParseOptions{d, false});
  }
  for (int A = 0; A < d.m; ++A) {
    for (int a = 0; a < d.normal_count(); ++a) {
      if (!seen[sz(A)][sz(a)]) fail("/F", "missing right-hand side for A = " + std::to_string(A + 1) + ", alpha = " + std::to_string(d.k + a + 1));
    }
  }
  if (const auto* g = optional_member(j, "guards")) {
    array(*g, "/guards");
    for (std::size_t i = 0; i < g->size(); ++i) sys.guards.push_back(expression_from_json((*g)[i], "/guards/" + std::to_string(i), ParseOptions{d, false}));
  }
  guarded("", [&] { sys.validate(); return 0; });
  return sys;
}

CauchyInput cauchy_input_from_json(const Json& j, const SystemSpec& sys, int default_order) {
  CauchyInput in;
  if (const auto* o = optional_member(j, "order")) {
    in.order = int_from_json(*o, "/order");
    if (*in.order < 2) fail("/order", "order must be at least 2");
  }
  const int order = in.order.value_or(default_order);
  const auto& data = array(member(j, "data", ""), "/data", sz(sys.dims.m));
  for (std::size_t A = 0; A < data.size(); ++A) {
    in.data.a.push_back(series_from_json(data[A], "/data/" + std::to_string(A), sz(sys.dims.k), order));
  }
  if (const auto* s = optional_member(j, "slope")) {
    in.slope = Slope{rational_matrix(*s, "/slope", sz(sys.dims.normal_count()), sz(sys.dims.k))};
  }
  return in;
}

EdsInput eds_input_from_json(const Json& j, const Dims& d) {
  EdsInput in;
  const std::size_t n = sz(d.n), m = sz(d.m);
  const auto z = rational_vector(member(j, "z", ""), "/z", n + m + n * m);
  in.z.x.assign(z.begin(), z.begin() + static_cast<long>(n));
  in.z.p.assign(z.begin() + static_cast<long>(n), z.begin() + static_cast<long>(n + m));
  for (std::size_t A = 0; A < m; ++A) {
    const auto first = z.begin() + static_cast<long>(n + m + A * n);
    in.z.pj.emplace_back(first, first + static_cast<long>(n));
  }
  const auto& b = member(j, "basis", "");
  const int l = int_from_json(member(b, "l", "/basis"), "/basis/l");
  if (l < 0 || l > d.n) fail("/basis/l", "l must lie in 0.." + std::to_string(d.n));
  in.basis.l = l;
  in.basis.c_ab = rational_matrix(member(b, "c_ab", "/basis"), "/basis/c_ab", sz(l), n - sz(l));
  in.basis.c_aA = rational_matrix(member(b, "c_aA", "/basis"), "/basis/c_aA", sz(l), m);
  const auto& c = array(member(b, "c_aAj", "/basis"), "/basis/c_aAj", sz(l));
  for (std::size_t a = 0; a < sz(l); ++a) in.basis.c_aAj.push_back(rational_matrix(c[a], "/basis/c_aAj/" + std::to_string(a), m, n));
  return in;
}

MongeRhs monge_rhs_from_json(const Json& j) {
  const int n = int_from_json(member(j, "n", ""), "/n");
  if (n < 2) fail("/n", "n must be at least 2");
  MongeRhs rhs = MongeRhs::zero(n);
  if (const auto* x0 = optional_member(j, "x0")) rhs.x0 = rational_vector(*x0, "/x0", sz(n));
  const ParseOptions opts{Dims{n, 1, n}, true};
  std::vector<std::vector<bool>> seen(sz(n - 1), std::vector<bool>(sz(n - 1), false));
  const auto& f = array(member(j, "f", ""), "/f");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::string w = "/f/" + std::to_string(i);
    const int alpha = int_from_json(member(f[i], "alpha", w), w + "/alpha");
    const int beta = int_from_json(member(f[i], "beta", w), w + "/beta");
    for (auto [v, name] : {std::pair{alpha, "alpha"}, std::pair{beta, "beta"}}) {
      if (v < 2 || v > n) fail(w + "/" + name, std::string(name) + " must lie in 2.." + std::to_string(n));
    }
    const auto e = expression_from_json(member(f[i], "expr", w), w + "/expr", opts);
    rhs.f[sz(alpha - 2)][sz(beta - 2)] = e;
    seen[sz(alpha - 2)][sz(beta - 2)] = true;
    // a single entry stands for both f_ab and f_ba
    if (!seen[sz(beta - 2)][sz(alpha - 2)]) rhs.f[sz(beta - 2)][sz(alpha - 2)] = e;
  }
  guarded("/f", [&] { rhs.validate(); return 0; });
  return rhs;
}

MongeData monge_data_from_json(const Json& j, int n, int default_order) {
  const auto& list = array(j, "/data", sz(n));
  MongeData data;
  data.a = series_from_json(list[0], "/data/0", 1, default_order);
  for (std::size_t i = 1; i < sz(n); ++i) data.a_n.push_back(series_from_json(list[i], "/data/" + std::to_string(i), 1, default_order - 1));
  return data;
}

SphereCurve curve_from_json(const Json& j, int default_order) {
  int order = default_order;
  if (const auto* o = optional_member(j, "order")) order = int_from_json(*o, "/order");
  if (order < 2) fail("/order", "order must be at least 2");
  const auto* form = optional_member(j, "form");
  if (form && *form == "unnormalized") {
    const auto& v = array(member(j, "v", ""), "/v");
    if (v.size() < 2) fail("/v", "need at least two components");
    std::vector<TruncatedSeries> vs;
    for (std::size_t i = 0; i < v.size(); ++i) vs.push_back(series_from_json(v[i], "/v/" + std::to_string(i), 1, order));
    return SphereCurve::from_unnormalized(vs, order);
  }
  if (form) fail("/form", "unknown curve form");
  SphereCurve c;
  c.n = int_from_json(member(j, "n", ""), "/n");
  if (c.n < 2) fail("/n", "n must be at least 2");
  c.order = order;
  const auto& g = array(member(j, "gamma", ""), "/gamma", sz(c.n + 1));
  for (std::size_t i = 0; i < g.size(); ++i) c.gamma.push_back(series_from_json(g[i], "/gamma/" + std::to_string(i), 1, order));
  guarded("/gamma", [&] { c.validate(); return 0; });
  return c;
}

Json to_json(const Jet2& jet) {
  Json u2 = Json::array();
  for (const auto& m : jet.u2) u2.push_back(matrix_json(m));
  return {{"u", vector_json(jet.u)}, {"u1", matrix_json(jet.u1)}, {"u2", u2}};
}

Json to_json(const Witness& w) {
  Json out{{"tensor", w.tensor}, {"indices", w.indices}, {"label", w.label()}};
  if (w.point) {
    out["point"] = *w.point;
    out["difference"] = to_json(w.difference);
  }
  if (!w.symbolic.empty()) out["symbolic"] = w.symbolic;
  return out;
}

Json to_json(const CompatReport& r) {
  Json points = Json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    const auto& t = r.tensors[i];
    points.push_back({{"x", vector_json(p.x)}, {"p", vector_json(p.p)}, {"pd", matrix_json(p.pd)},
                      {"phi", vector_json(t.phi)}, {"psi", vector_json(t.psi)}});
  }
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));
  Json out{{"seed", r.seed}, {"points", points}, {"witnesses", witnesses}, {"verdict", r.verdict()}, {"compatible", r.compatible()}};
  if (r.symbolic) {
    Json sw = Json::array();
    for (const auto& w : r.symbolic->witnesses) sw.push_back(to_json(w));
    out["symbolic"] = {{"method", r.symbolic->method}, {"holds", r.symbolic->holds}, {"order", r.symbolic->order}, {"witnesses", sw}};
  }
  return out;
}

Json to_json(const SlopeCheck& s) {
  std::vector<std::vector<Rational>> V;
  for (std::size_t i = 0; i < s.V.rows(); ++i) {
    V.emplace_back();
    for (std::size_t k = 0; k < s.V.cols(); ++k) V.back().push_back(s.V(i, k));
  }
  return {{"noncharacteristic", s.noncharacteristic}, {"determinant", to_json(s.determinant)}, {"V", matrix_json(V)}};
}

Json to_json(const SolutionSeries& u) {
  Json series = Json::array();
  for (const auto& s : u.u) series.push_back(to_json(s));
  return {{"n", u.dims.n}, {"k", u.dims.k}, {"m", u.dims.m}, {"order", u.order}, {"u", series}};
}

Json to_json(const Residual& r) {
  Json out{{"clean", r.clean()}};
  if (auto d = r.lowest_degree()) out["lowest_degree"] = *d;
  else out["summary"] = "clean";
  return out;
}

Json to_json(const ElementResiduals& r) {
  auto cube = [](const std::vector<std::vector<std::vector<Rational>>>& c) {
    Json out = Json::array();
    for (const auto& m : c) out.push_back(matrix_json(m));
    return out;
  };
  return {{"f", matrix_json(r.f)}, {"g", matrix_json(r.g)}, {"g_alpha", cube(r.g_alpha)}, {"h", cube(r.h)}, {"integral", r.integral()}};
}

Json to_json(const PolarSpaceResult& r) {
  Json out{{"dimension", r.dimension}, {"basis", matrix_json(r.basis)}, {"noncharacteristic", r.noncharacteristic}};
  if (r.graph) out["graph"] = matrix_json(*r.graph);
  return out;
}

Json to_json(const MongeReport& r) {
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) {
    Json wj{{"condition", w.condition}, {"alpha", w.alpha}, {"beta", w.beta}, {"expression", w.expression}, {"label", w.label()}};
    if (w.gamma) wj["gamma"] = w.gamma;
    witnesses.push_back(wj);
  }
  Json out{{"n", r.n}, {"linear_in_t", r.linear_in_t}, {"admissible", r.admissible}, {"conclusive", r.conclusive},
           {"method", r.method}, {"witnesses", witnesses}, {"verdict", r.verdict()}};
  if (r.g) {
    Json g = Json::array();
    for (std::size_t a = 0; a < r.g->size(); ++a) {
      for (std::size_t b = 0; b < (*r.g)[a].size(); ++b) {
        g.push_back({{"alpha", a + 2}, {"beta", b + 2}, {"expr", to_string((*r.g)[a][b])}});
      }
    }
    out["g"] = g;
  }
  if (r.potential) out["potential"] = to_json(*r.potential);
  return out;
}

Json to_json(const RankProfile& r) {
  Json out{{"rank_one", r.rank_one}};
  if (r.alpha) {
    out["alpha"] = *r.alpha + 1;
    out["beta"] = *r.beta + 1;
    out["monomial"] = r.monomial->exponents();
    out["value"] = to_json(r.value);
  }
  return out;
}

Json to_json(const CurveData& d) {
  Json G = Json::array(), an = Json::array();
  for (const auto& s : d.Gamma) G.push_back(to_json(s));
  for (const auto& s : d.a_n) an.push_back(to_json(s));
  return {{"Gamma", G}, {"phi", to_json(d.phi)}, {"a", to_json(d.a)}, {"a_n", an}};
}

Json to_json(const NondegeneracyReport& r) {
  Json out{{"n", r.n}, {"j_max", r.j_max}, {"span_dims", r.span_dims}, {"hyperplane", r.hyperplane},
           {"normals", matrix_json(r.normals)}, {"levi_number", r.levi_number}, {"summary", r.summary()}};
  out["l"] = r.l ? Json(*r.l) : Json(nullptr);
  if (r.reduced_dims) out["reduced_dims"] = *r.reduced_dims;
  if (r.data_dims) out["data_dims"] = *r.data_dims;
  if (r.levi_rank) out["levi_rank"] = *r.levi_rank;
  if (r.span_rank_minus_one) out["span_rank_minus_one"] = *r.span_rank_minus_one;
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ck::io
