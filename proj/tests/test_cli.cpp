#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ck/cli.hpp"
#include "ck/io.hpp"

using namespace ck;
using cli::CommandConfig;

namespace {

const std::string kData = CK_DATA_DIR;

struct Run {
  int status;
  std::string out, err;
};

Run run(CommandConfig c) {
  std::ostringstream out, err;
  const int status = cli::run(c, out, err);
  return {status, out.str(), err.str()};
}

CommandConfig cmd(const std::string& sub) {
  CommandConfig c;
  c.subcommand = sub;
  return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("ck_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

// Every sample invocation with the exit status it must produce.
struct Case {
  CommandConfig config;
  int status;
  std::string verdict;
};

std::vector<Case> corpus() {
  std::vector<Case> cases;
  auto add = [&](CommandConfig c, int status, std::string verdict) { cases.push_back({std::move(c), status, std::move(verdict)}); };
  auto c = cmd("compat");
  c.system = kData + "/transport.json";
  add(c, 0, "compatible (symbolic)");
  c.system = kData + "/burgers.json";
  add(c, 0, "compatible (symbolic)");
  c.system = kData + "/twisted.json";
  add(c, 1, "violated");

  c = cmd("solve");
  c.system = kData + "/burgers.json";
  c.cauchy = kData + "/line_data.json";
  add(c, 0, "residual clean");
  c.system = kData + "/transport.json";
  c.cauchy = kData + "/line_data_tilted.json";
  add(c, 0, "residual clean");
  c.system = kData + "/twisted.json";
  c.cauchy = kData + "/line_data.json";
  add(c, 1, "");

  c = cmd("jet");
  c.system = kData + "/burgers.json";
  c.cauchy = kData + "/line_data.json";
  add(c, 0, "approximate solution exists");
  c.system = kData + "/twisted.json";
  add(c, 1, "");

  c = cmd("slope");
  c.system = kData + "/transport.json";
  c.slope = kData + "/slope_half.json";
  add(c, 0, "non-characteristic");
  c.slope = kData + "/slope_characteristic.json";
  add(c, 1, "characteristic");

  c = cmd("eds");
  c.system = kData + "/transport.json";
  c.element = kData + "/transport_element.json";
  add(c, 0, "integral element; polar space dimension 2");

  c = cmd("monge");
  c.rhs = kData + "/f_const.json";
  add(c, 1, "inadmissible: t-independent nonzero f");
  c.rhs = kData + "/f_x1t.json";
  add(c, 1, "inadmissible: g violates the closedness conditions");
  c.rhs = kData + "/f_potential.json";
  c.data = kData + "/monge_data.json";
  add(c, 0, "admissible");

  c = cmd("gauss");
  c.curve = kData + "/moment.json";
  c.order = 8;
  c.then_levi = true;
  add(c, 0, "l = 3 at 0; Levi number verdict: n");
  c.curve = kData + "/great_circle.json";
  add(c, 1, "not finitely nondegenerate at 0 up to j = 7; Levi number verdict: not finitely nondegenerate at 0");
  c.then_levi = false;
  add(c, 0, "rank-one hypersurface constructed to order 8");

  c = cmd("levi");
  c.curve = kData + "/moment.json";
  c.j_max = 5;
  add(c, 0, "l = 3 at 0; Levi number verdict: n");
  return cases;
}

}  // namespace

TEST_CASE("sample invocations: exit status and verdicts") {
  for (const auto& k : corpus()) {
    CAPTURE(k.config.subcommand);
    CAPTURE(k.config.system + k.config.rhs + k.config.curve);
    const auto r = run(k.config);
    CHECK(r.status == k.status);
    CHECK(r.err.empty());
    if (!k.verdict.empty()) CHECK(first_line(r.out) == k.verdict);
  }
}

TEST_CASE("JSON reports are deterministic and carry the status") {
  for (auto k : corpus()) {
    k.config.format = cli::Format::json;
    const auto a = run(k.config);
    const auto b = run(k.config);
    CHECK(a.out == b.out);
    const auto j = io::Json::parse(a.out);
    CHECK(j["status"] == k.status);
    CHECK(j["command"] == k.config.subcommand);
    if (!k.verdict.empty()) CHECK(j["verdict"] == k.verdict);
  }
}

TEST_CASE("seed changes the sampled points") {
  auto c = cmd("compat");
  c.system = kData + "/twisted.json";
  c.format = cli::Format::json;
  const auto a = io::Json::parse(run(c).out);
  c.seed = 5;
  const auto b = io::Json::parse(run(c).out);
  CHECK(a["report"]["points"][0] == b["report"]["points"][0]);  // the base point comes first
  CHECK(a["report"]["points"][1] != b["report"]["points"][1]);
  CHECK(b["report"]["seed"] == 5);
  c.samples = 3;
  CHECK(io::Json::parse(run(c).out)["report"]["points"].size() == 3);
}

TEST_CASE("order resolution") {
  auto c = cmd("solve");
  c.system = kData + "/burgers.json";
  c.cauchy = temp_file("no_order.json", R"({"data": ["x[1]"]})");
  c.format = cli::Format::json;
  auto order_of = [&] { return io::Json::parse(run(c).out)["report"]["solution"]["order"].get<int>(); };
  CHECK(order_of() == 8);
  setenv("CK_DEFAULT_ORDER", "5", 1);
  CHECK(cli::default_order() == 5);
  CHECK(order_of() == 5);
  c.order = 3;
  CHECK(order_of() == 3);
  setenv("CK_DEFAULT_ORDER", "junk", 1);
  CHECK(cli::default_order() == 8);
  unsetenv("CK_DEFAULT_ORDER");

  c.order.reset();
  c.cauchy = kData + "/line_data.json";
  CHECK(order_of() == 8);
}

TEST_CASE("input errors exit with status 2 and name the location") {
  auto c = cmd("compat");
  c.system = kData + "/does_not_exist.json";
  auto r = run(c);
  CHECK(r.status == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("cannot open") != std::string::npos);

  c.system = temp_file("bad_expr.json", R"({"n": 2, "k": 1, "m": 1, "x0": [0, 0], "p0": [0], "pprime0": [[1]],
                                            "F": [{"A": 1, "alpha": 2, "expr": "pd[1][1] +"}]})");
  r = run(c);
  CHECK(r.status == 2);
  CHECK(r.err.find("/F/0/expr") != std::string::npos);

  c.system = temp_file("bad_alpha.json", R"({"n": 2, "k": 1, "m": 1, "x0": [0, 0], "p0": [0], "pprime0": [[1]],
                                             "F": [{"A": 1, "alpha": 1, "expr": "0"}]})");
  r = run(c);
  CHECK(r.status == 2);
  CHECK(r.err.find("/F/0/alpha") != std::string::npos);

  c.system = temp_file("bad_x0.json", R"({"n": 2, "k": 1, "m": 1, "x0": ["1/0", 0], "p0": [0], "pprime0": [[1]],
                                          "F": [{"A": 1, "alpha": 2, "expr": "0"}]})");
  r = run(c);
  CHECK(r.status == 2);
  CHECK(r.err.find("/x0/0") != std::string::npos);

  c.system = temp_file("not_json.json", "{ n: ");
  CHECK(run(c).status == 2);

  c.system = temp_file("missing_rhs.json", R"({"n": 3, "k": 1, "m": 1, "x0": [0, 0, 0], "p0": [0], "pprime0": [[1]],
                                              "F": [{"A": 1, "alpha": 2, "expr": "0"}]})");
  r = run(c);
  CHECK(r.status == 2);
  CHECK(r.err.find("alpha = 3") != std::string::npos);

  auto m = cmd("monge");
  m.rhs = temp_file("asym.json", R"({"n": 3, "f": [{"alpha": 2, "beta": 3, "expr": "t"}, {"alpha": 3, "beta": 2, "expr": "2*t"}]})");
  CHECK(run(m).status == 2);
  m.rhs = temp_file("bad_beta.json", R"({"n": 3, "f": [{"alpha": 2, "beta": 4, "expr": "t"}]})");
  r = run(m);
  CHECK(r.status == 2);
  CHECK(r.err.find("/f/0/beta") != std::string::npos);

  auto g = cmd("gauss");
  g.curve = temp_file("off_sphere.json", R"j({"n": 2, "gamma": ["2*sin(x[1])", "0", "-cos(x[1])"]})j");
  CHECK(run(g).status == 2);

  CHECK(run(cmd("frobnicate")).status == 2);
  CHECK(run(cmd("solve")).status == 2);
}

TEST_CASE("series JSON round trip through the solver report") {
  auto c = cmd("solve");
  c.system = kData + "/burgers.json";
  c.cauchy = kData + "/line_data.json";
  c.format = cli::Format::json;
  const auto j = io::Json::parse(run(c).out);
  const auto u = io::series_from_json(j["report"]["solution"]["u"][0], "/u/0", 2, 8);
  TruncatedSeries expected(2, 8);
  for (int e = 0; e <= 7; ++e) expected.set_coefficient(MultiIndex{1, e}, 1);
  CHECK(u == expected);
  CHECK(io::to_json(u) == j["report"]["solution"]["u"][0]);

  // a serialized series is accepted as data in place of an expression
  const auto data = temp_file("series_data.json", io::Json{{"data", io::Json::array({io::to_json(TruncatedSeries::variable(1, 6, 0))})}}.dump());
  c.cauchy = data;
  const auto k = io::Json::parse(run(c).out);
  CHECK(k["status"] == 0);
  CHECK(k["report"]["solution"]["order"] == 6);
}

TEST_CASE("output file") {
  auto c = cmd("slope");
  c.system = kData + "/transport.json";
  c.slope = kData + "/slope_half.json";
  c.output = (std::filesystem::temp_directory_path() / "ck_test_slope_report.txt").string();
  const auto r = run(c);
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream f(c.output);
  std::string line;
  std::getline(f, line);
  CHECK(line == "non-characteristic");
  std::getline(f, line);
  CHECK(line == "  det V = 3/2 (1.5)");
}
