#pragma once

// JSON readers and writers for the pipeline inputs and reports.
//
// Rationals are written as strings ("3", "-1/2"). Readers also accept JSON integers.
// Schema errors throw Error(input) naming the JSON pointer of the offending value.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ck/cauchy.hpp"
#include "ck/compat.hpp"
#include "ck/eds.hpp"
#include "ck/geometry.hpp"
#include "ck/mongeampere.hpp"
#include "ck/series.hpp"
#include "ck/system.hpp"

namespace ck::io {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

Json to_json(const Rational& q);
Rational rational_from_json(const Json& j, const std::string& where);

Json to_json(const TruncatedSeries& s);
/// Accepts the serialized form {"arity", "order", "terms"} or an expression string in
/// x[1] .. x[arity], expanded at `default_order`.
TruncatedSeries series_from_json(const Json& j, const std::string& where, std::size_t arity, int default_order);

Json to_json(const SystemSpec& sys);
SystemSpec system_from_json(const Json& j);

struct CauchyInput {
  CauchyData data;
  std::optional<int> order;
  std::optional<Slope> slope;
};
CauchyInput cauchy_input_from_json(const Json& j, const SystemSpec& sys, int default_order);

struct EdsInput {
  JetPoint z;
  IntegralElementBasis basis;
};
EdsInput eds_input_from_json(const Json& j, const Dims& dims);

MongeRhs monge_rhs_from_json(const Json& j);
/// Data list [a, a_2, ..., a_n] of univariate series.
MongeData monge_data_from_json(const Json& j, int n, int default_order);

SphereCurve curve_from_json(const Json& j, int default_order);

Json to_json(const Jet2& jet);
Json to_json(const Witness& w);
Json to_json(const CompatReport& r);
Json to_json(const SlopeCheck& s);
Json to_json(const SolutionSeries& u);
Json to_json(const Residual& r);
Json to_json(const ElementResiduals& r);
Json to_json(const PolarSpaceResult& r);
Json to_json(const MongeReport& r);
Json to_json(const RankProfile& r);
Json to_json(const CurveData& d);
Json to_json(const NondegeneracyReport& r);

/// Deterministic rendering: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace ck::io
