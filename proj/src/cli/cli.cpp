#include "ck/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ck/cauchy.hpp"
#include "ck/compat.hpp"
#include "ck/eds.hpp"
#include "ck/error.hpp"
#include "ck/geometry.hpp"
#include "ck/io.hpp"
#include "ck/mongeampere.hpp"

namespace ck::cli {

namespace {

using io::Json;

// Exit codes of the dispatcher.
constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Outcome {
  int status = kPositive;
  std::string verdict;
  Json report = Json::object();
  std::vector<std::string> lines;  // text body below the verdict line
};

std::string fmt(const Rational& q) {
  if (q.get_den() == 1) return to_string(q);
  return to_string(q) + " (" + to_decimal(q) + ")";
}

std::string fmt(const std::vector<Rational>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

std::string fmt_dims(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

const std::string& require(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(ErrorCode::input, std::string("missing required option ") + flag);
  return path;
}

int resolve_order(const CommandConfig& c, std::optional<int> from_file) {
  const int N = c.order ? *c.order : from_file ? *from_file : default_order();
  if (N < 2) throw Error(ErrorCode::input, "order must be at least 2");
  return N;
}

std::optional<int> file_order(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  auto it = j.find("order");
  if (it == j.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<int>();
}

// Smallest order among serialized series in a data list; expression strings carry none.
std::optional<int> series_order(const Json& list) {
  std::optional<int> out;
  if (!list.is_array()) return out;
  for (const auto& s : list) {
    if (!s.is_object() || !s.contains("order") || !s["order"].is_number_integer()) continue;
    const int o = s["order"].get<int>();
    out = out ? std::min(*out, o) : o;
  }
  return out;
}

std::optional<int> input_order(const Json& j, const char* list_key) {
  if (auto o = file_order(j)) return o;
  if (j.is_object() && j.contains(list_key)) return series_order(j[list_key]);
  return series_order(j);
}

std::string compat_verdict(const CompatReport& r) {
  if (!r.compatible_at_samples()) return "violated";
  if (!r.symbolic) return "compatible-at-samples";
  if (!r.symbolic->holds) return "violated (" + r.symbolic->method + ")";
  return r.symbolic->method == "rational-identity" ? "compatible (symbolic)" : "compatible (" + r.symbolic->method + ")";
}

Outcome run_compat(const CommandConfig& c) {
  const auto sys = io::system_from_json(io::read_json_file(require(c.system, "--system")));
  CompatOptions opts;
  opts.samples = c.samples;
  opts.seed = c.seed;
  opts.order = resolve_order(c, std::nullopt);
  const auto rep = check_compatibility(sys, opts);
  Outcome o;
  o.verdict = compat_verdict(rep);
  o.status = rep.compatible() ? kPositive : kNegative;
  o.report = io::to_json(rep);
  o.lines.push_back("points evaluated: " + std::to_string(rep.points.size()) + " (seed " + std::to_string(rep.seed) + ")");
  for (const auto& w : rep.witnesses) {
    o.lines.push_back("witness " + w.label() + " - swapped at point " + std::to_string(*w.point) + ": " + fmt(w.difference));
  }
  if (rep.symbolic) {
    o.lines.push_back("symbolic check: " + rep.symbolic->method + (rep.symbolic->holds ? ", identities hold" : ", identities fail"));
    for (const auto& w : rep.symbolic->witnesses) o.lines.push_back("symbolic witness " + w.label() + ": " + w.symbolic);
  }
  return o;
}

struct CauchyInputs {
  SystemSpec sys;
  io::CauchyInput in;
  int order = 0;
};

CauchyInputs load_cauchy(const CommandConfig& c) {
  CauchyInputs r;
  r.sys = io::system_from_json(io::read_json_file(require(c.system, "--system")));
  const auto j = io::read_json_file(require(c.cauchy, "--cauchy"));
  r.order = resolve_order(c, input_order(j, "data"));
  r.in = io::cauchy_input_from_json(j, r.sys, r.order);
  return r;
}

void add_series_lines(Outcome& o, const std::vector<TruncatedSeries>& u) {
  for (std::size_t A = 0; A < u.size(); ++A) o.lines.push_back("u^" + std::to_string(A + 1) + " = " + to_string(u[A], "x"));
}

Outcome run_solve(const CommandConfig& c) {
  const auto in = load_cauchy(c);
  Outcome o;
  SolutionSeries u;
  Residual res;
  if (in.in.slope) {
    const auto tilted = tilt_system(in.sys, *in.in.slope);
    const auto ut = solve(tilted, in.in.data, in.order);
    res = residual(tilted, ut, in.in.data);
    u = pullback(ut, *in.in.slope);
    o.report["tilted"] = io::to_json(ut);
  } else {
    u = solve(in.sys, in.in.data, in.order);
    res = residual(in.sys, u, in.in.data);
  }
  o.report["solution"] = io::to_json(u);
  o.report["residual"] = io::to_json(res);
  o.status = res.clean() ? kPositive : kNegative;
  o.verdict = res.clean() ? "residual clean" : "residual nonzero at degree " + std::to_string(*res.lowest_degree());
  add_series_lines(o, u.u);
  return o;
}

Outcome run_jet(const CommandConfig& c) {
  const auto in = load_cauchy(c);
  const auto data = DataJet2::from(in.in.data);
  const auto jet = in.in.slope ? tilted_approximate_jet(in.sys, *in.in.slope, data) : approximate_jet(in.sys, data);
  Outcome o;
  o.verdict = "approximate solution exists";
  o.report["jet"] = io::to_json(jet);
  for (std::size_t A = 0; A < jet.u.size(); ++A) {
    const std::string a = std::to_string(A + 1);
    o.lines.push_back("u^" + a + " = " + fmt(jet.u[A]));
    o.lines.push_back("u^" + a + "_i = " + fmt(jet.u1[A]));
    for (std::size_t i = 0; i < jet.u2[A].size(); ++i) {
      o.lines.push_back("u^" + a + "_" + std::to_string(i + 1) + "j = " + fmt(jet.u2[A][i]));
    }
  }
  return o;
}

Outcome run_slope(const CommandConfig& c) {
  const auto sys = io::system_from_json(io::read_json_file(require(c.system, "--system")));
  const auto j = io::read_json_file(require(c.slope, "--slope"));
  const Json& s = j.is_object() ? j.at("slope") : j;
  std::vector<std::vector<Rational>> rows;
  if (!s.is_array() || s.size() != static_cast<std::size_t>(sys.dims.normal_count())) {
    throw Error(ErrorCode::input, "/slope: expected " + std::to_string(sys.dims.normal_count()) + " rows");
  }
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (!s[a].is_array() || s[a].size() != static_cast<std::size_t>(sys.dims.k)) {
      throw Error(ErrorCode::input, "/slope/" + std::to_string(a) + ": expected " + std::to_string(sys.dims.k) + " entries");
    }
    rows.emplace_back();
    for (std::size_t L = 0; L < s[a].size(); ++L) rows.back().push_back(io::rational_from_json(s[a][L], "/slope/" + std::to_string(a) + "/" + std::to_string(L)));
  }
  const auto check = slope_noncharacteristic(sys, Slope{rows});
  Outcome o;
  o.status = check.noncharacteristic ? kPositive : kNegative;
  o.verdict = check.noncharacteristic ? "non-characteristic" : "characteristic";
  o.report = io::to_json(check);
  o.lines.push_back("det V = " + fmt(check.determinant));
  return o;
}

Outcome run_eds(const CommandConfig& c) {
  const auto sys = io::system_from_json(io::read_json_file(require(c.system, "--system")));
  const auto in = io::eds_input_from_json(io::read_json_file(require(c.element, "--element")), sys.dims);
  const auto res = element_residuals(sys, in.z, in.basis);
  Outcome o;
  o.report["residuals"] = io::to_json(res);
  if (!res.integral()) {
    o.status = kNegative;
    o.verdict = "not an integral element";
    return o;
  }
  const auto polar = polar_space(sys, in.z, in.basis);
  o.report["polar_space"] = io::to_json(polar);
  o.verdict = "integral element; polar space dimension " + std::to_string(polar.dimension);
  o.lines.push_back(std::string("first k vectors ") + (polar.noncharacteristic ? "non-characteristic" : "characteristic"));
  if (polar.graph) {
    for (std::size_t i = 0; i < polar.graph->size(); ++i) o.lines.push_back("graph row " + std::to_string(i + 1) + ": " + fmt((*polar.graph)[i]));
  }
  return o;
}

Outcome run_monge(const CommandConfig& c) {
  const auto rhs = io::monge_rhs_from_json(io::read_json_file(require(c.rhs, "--rhs")));
  std::optional<Json> data_json;
  if (!c.data.empty()) data_json = io::read_json_file(c.data);
  const int N = resolve_order(c, data_json ? input_order(*data_json, "data") : std::nullopt);
  const auto rep = classify_rhs(rhs, N);
  Outcome o;
  o.report["classification"] = io::to_json(rep);
  o.verdict = rep.verdict();
  for (const auto& w : rep.witnesses) o.lines.push_back("witness: " + w.label());
  if (rep.potential) o.lines.push_back("potential v = " + to_string(*rep.potential, "x"));
  if (rep.conclusive && !rep.admissible) {
    o.status = kNegative;
    return o;
  }
  if (!data_json) return o;

  const Json& list = data_json->is_object() ? data_json->at("data") : *data_json;
  const auto data = io::monge_data_from_json(list, rhs.n, N);
  const auto sol = solve_full(rhs, data, N);
  const auto profile = hessian_rank_profile(sol.u);
  o.report["solution"] = io::to_json(sol.u);
  o.report["reduced_system"] = io::to_json(sol.reduced);
  o.report["rank_profile"] = io::to_json(profile);
  o.lines.push_back("u = " + to_string(sol.u, "x"));
  o.lines.push_back("residual clean to order " + std::to_string(N - 2));
  o.lines.push_back(std::string("Hessian rank one: ") + (profile.rank_one ? "yes" : "no"));
  return o;
}

void add_levi(Outcome& o, const NondegeneracyReport& rep) {
  o.report["nondegeneracy"] = io::to_json(rep);
  o.lines.push_back(rep.summary());
  o.lines.push_back("span dimensions j = 0.." + std::to_string(rep.j_max) + ": " + fmt_dims(rep.span_dims));
  for (const auto& nv : rep.normals) o.lines.push_back("hyperplane normal " + fmt(nv));
  if (rep.levi_rank) o.lines.push_back("Levi form rank at 0: " + std::to_string(*rep.levi_rank));
  if (rep.span_rank_minus_one) o.lines.push_back("span dimension at j = 1, minus one: " + std::to_string(*rep.span_rank_minus_one));
  if (rep.levi_number == "not finitely nondegenerate at 0") o.status = kNegative;
}

int resolve_j_max(const CommandConfig& c, int N) { return c.j_max ? *c.j_max : N - 1; }

Outcome run_gauss(const CommandConfig& c) {
  const auto j = io::read_json_file(require(c.curve, "--curve"));
  const int N = resolve_order(c, file_order(j));
  auto curve = io::curve_from_json(j, N);
  const auto h = construct_from_curve(curve, N);
  Outcome o;
  o.report["curve_data"] = io::to_json(*h.data);
  o.report["u"] = io::to_json(h.u);
  o.verdict = "rank-one hypersurface constructed to order " + std::to_string(N);
  o.lines.push_back("u = " + to_string(h.u, "x"));
  if (c.then_levi) {
    add_levi(o, nondegeneracy_analysis(h, resolve_j_max(c, N)));
    o.verdict = o.lines[1];
    o.lines.erase(o.lines.begin() + 1);
  }
  return o;
}

Outcome run_levi(const CommandConfig& c) {
  HypersurfaceModel h;
  int N = 0;
  if (!c.curve.empty()) {
    const auto j = io::read_json_file(c.curve);
    N = resolve_order(c, file_order(j));
    h = construct_from_curve(io::curve_from_json(j, N), N);
  } else {
    const auto j = io::read_json_file(require(c.series, "--curve or --series"));
    if (!j.is_object() || !j.contains("arity") || !j["arity"].is_number_integer()) throw Error(ErrorCode::input, "/arity: expected an integer");
    N = resolve_order(c, file_order(j));
    h.u = io::series_from_json(j, "", j["arity"].get<std::size_t>(), N);
    N = h.u.order();
  }
  Outcome o;
  add_levi(o, nondegeneracy_analysis(h, resolve_j_max(c, N)));
  o.verdict = o.lines.front();
  o.lines.erase(o.lines.begin());
  return o;
}

Outcome dispatch(const CommandConfig& c) {
  if (c.samples < 1) throw Error(ErrorCode::input, "--samples must be at least 1");
  if (c.subcommand == "compat") return run_compat(c);
  if (c.subcommand == "solve") return run_solve(c);
  if (c.subcommand == "jet") return run_jet(c);
  if (c.subcommand == "slope") return run_slope(c);
  if (c.subcommand == "eds") return run_eds(c);
  if (c.subcommand == "monge") return run_monge(c);
  if (c.subcommand == "gauss") return run_gauss(c);
  if (c.subcommand == "levi") return run_levi(c);
  throw Error(ErrorCode::input, "unknown subcommand '" + c.subcommand + "'");
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::incompatible:
    case ErrorCode::residual:
    case ErrorCode::characteristic:
    case ErrorCode::unsolvable:
      return kNegative;
    default:
      return kUsage;
  }
}

Json witnesses_json(const Error& e) {
  Json out = Json::array();
  if (const auto* inc = dynamic_cast<const IncompatibleError*>(&e)) {
    for (const auto& w : inc->witnesses()) out.push_back(io::to_json(w));
  }
  return out;
}

}  // namespace

int default_order() {
  if (const char* env = std::getenv("CK_DEFAULT_ORDER")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 2 && v < 1000) return static_cast<int>(v);
  }
  return 8;
}

int run(const CommandConfig& config, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    o = dispatch(config);
  } catch (const Error& e) {
    o.status = status_for(e.code());
    if (o.status == kUsage) {
      err << "ck " << config.subcommand << ": " << error_code_name(e.code()) << ": " << e.what() << "\n";
      return kUsage;
    }
    o.verdict = std::string(error_code_name(e.code())) + ": " + e.what();
    o.report = {{"error", error_code_name(e.code())}, {"message", e.what()}};
    if (const auto* r = dynamic_cast<const ResidualError*>(&e)) {
      o.report["equation"] = {r->equation_A() + 1, r->equation_alpha() + 1};
      o.report["monomial"] = r->monomial().exponents();
      o.report["value"] = io::to_json(r->value());
    }
    const auto w = witnesses_json(e);
    if (!w.empty()) {
      o.report["witnesses"] = w;
      for (const auto& wj : w) o.lines.push_back("witness " + wj["label"].get<std::string>());
    }
  } catch (const Json::exception& e) {
    err << "ck " << config.subcommand << ": input: " << e.what() << "\n";
    return kUsage;
  }

  std::string rendered;
  if (config.format == Format::json) {
    rendered = io::dump(Json{{"command", config.subcommand}, {"status", o.status}, {"verdict", o.verdict}, {"report", o.report}});
  } else {
    rendered = o.verdict + "\n";
    for (const auto& line : o.lines) rendered += "  " + line + "\n";
  }
  if (config.output.empty()) {
    out << rendered;
  } else {
    std::ofstream f(config.output);
    if (!f) {
      err << "ck: cannot write " << config.output << "\n";
      return kUsage;
    }
    f << rendered;
  }
  return o.status;
}

}  // namespace ck::cli
