#include <iostream>

#include "CLI11.hpp"

#include "ck/cli.hpp"

namespace {

void add_common(CLI::App* sub, ck::cli::CommandConfig& c, std::string& format) {
  sub->add_option("--order,-N", c.order, "truncation order N (default 8, or CK_DEFAULT_ORDER)")->check(CLI::Range(2, 64));
  sub->add_option("--output,-o", c.output, "write the report here instead of standard output");
  sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy problems for overdetermined first-order systems, rank-one Monge-Ampere systems and Gauss maps"};
  app.require_subcommand(1);
  ck::cli::CommandConfig c;
  std::string format = "text";

  auto* compat = app.add_subcommand("compat", "check the compatibility conditions of a system");
  compat->add_option("--system", c.system, "system JSON")->required();
  compat->add_option("--samples", c.samples, "number of evaluation points")->check(CLI::PositiveNumber);
  compat->add_option("--seed", c.seed, "sampling seed");

  auto* solve = app.add_subcommand("solve", "power-series solution of a Cauchy problem");
  solve->add_option("--system", c.system, "system JSON")->required();
  solve->add_option("--cauchy", c.cauchy, "data JSON {data, order, slope}")->required();

  auto* jet = app.add_subcommand("jet", "2-jet of the approximate solution at the base point");
  jet->add_option("--system", c.system, "system JSON")->required();
  jet->add_option("--cauchy", c.cauchy, "data JSON {data, order, slope}")->required();

  auto* slope = app.add_subcommand("slope", "test a slope for non-characteristicity at the base point");
  slope->add_option("--system", c.system, "system JSON")->required();
  slope->add_option("--slope", c.slope, "slope JSON {slope: [[...]]}")->required();

  auto* eds = app.add_subcommand("eds", "residuals and polar space of an integral element");
  eds->add_option("--system", c.system, "system JSON")->required();
  eds->add_option("--element", c.element, "element JSON {z, basis}")->required();

  auto* monge = app.add_subcommand("monge", "classify a Monge-Ampere right-hand side and optionally solve");
  monge->add_option("--rhs", c.rhs, "right-hand side JSON {n, f, x0}")->required();
  monge->add_option("--data", c.data, "Cauchy data JSON {data: [a, a_2, ..., a_n], order}");

  auto* gauss = app.add_subcommand("gauss", "hypersurface with rank-one Gauss map from a curve on the sphere");
  gauss->add_option("--curve", c.curve, "curve JSON")->required();
  std::string then;
  gauss->add_option("--then", then, "chain a further analysis")->check(CLI::IsMember({"levi"}));
  gauss->add_option("--jmax", c.j_max, "largest derivative order for the span test");

  auto* levi = app.add_subcommand("levi", "finite nondegeneracy of the tube over a hypersurface at 0");
  levi->add_option("--curve", c.curve, "curve JSON");
  levi->add_option("--series", c.series, "series JSON of u");
  levi->add_option("--jmax", c.j_max, "largest derivative order for the span test");

  for (auto* sub : {compat, solve, jet, slope, eds, monge, gauss, levi}) add_common(sub, c, format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  c.then_levi = then == "levi";
  c.format = format == "json" ? ck::cli::Format::json : ck::cli::Format::text;
  return ck::cli::run(c, std::cout, std::cerr);
}
