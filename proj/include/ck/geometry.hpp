#pragma once

// Hypersurfaces y = u(x) in R^{n+1} whose Gauss map has rank one, built from a curve on S^n,
// and the nondegeneracy of the tube over them.

#include <optional>
#include <string>
#include <vector>

#include "ck/rational.hpp"
#include "ck/series.hpp"

namespace ck {

/// v / sqrt(radicand); radicand is 1 whenever the root is rational.
struct SurdVector {
  std::vector<Rational> v;
  Rational radicand = 1;

  bool exact() const { return radicand == 1; }
};

/// Lower-hemisphere point (x, -sqrt(1 - |x|^2)) given by x, to x / sqrt(1 - |x|^2).
SurdVector stereographic_forward(const std::vector<Rational>& x);
/// y to the lower-hemisphere point (y, -1) / sqrt(1 + |y|^2), all n + 1 coordinates.
SurdVector stereographic_inverse(const std::vector<Rational>& y);

struct SphereCurve {
  int n = 0;
  int order = 0;
  std::vector<TruncatedSeries> gamma;  // n + 1 series in t

  /// gamma = (v, -1) / sqrt(1 + |v|^2)
  static SphereCurve from_unnormalized(const std::vector<TruncatedSeries>& v, int order);
  void validate() const;
};

struct CurveData {
  std::vector<TruncatedSeries> Gamma;  // n series, the projected curve
  TruncatedSeries phi;
  TruncatedSeries a;
  std::vector<TruncatedSeries> a_n;    // a_2 .. a_n
};

CurveData curve_to_cauchy_data(const SphereCurve& gamma);

struct HypersurfaceModel {
  TruncatedSeries u;  // arity n, u(0) = 0
  std::optional<CurveData> data;
};

HypersurfaceModel construct_from_curve(const SphereCurve& gamma, int order);

struct NondegeneracyReport {
  int n = 0;
  int j_max = 0;
  std::vector<int> span_dims;                  // j = 0 .. j_max
  std::optional<std::vector<int>> reduced_dims;  // pure x^1 derivatives, rank-one models only
  std::optional<std::vector<int>> data_dims;     // from the restrictions u(x^1, 0), u_a(x^1, 0)
  std::optional<int> l;
  bool hyperplane = false;
  std::vector<std::vector<Rational>> normals;
  std::optional<int> levi_rank;                // rank of the Hessian of u at 0
  std::optional<int> span_rank_minus_one;      // span dimension at j = 1, minus one
  std::string levi_number;                     // "n", "not finitely nondegenerate at 0" or "undetermined"

  std::string summary() const;
};

NondegeneracyReport nondegeneracy_analysis(const HypersurfaceModel& h, int j_max);

}  // namespace ck
