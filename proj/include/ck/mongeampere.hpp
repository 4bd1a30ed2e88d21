#pragma once

// Rank-one Monge-Ampere systems
//   Delta_ab(u) = u_11 u_ab - u_1b u_a1 = f_ab(x, u_11),  2 <= a, b <= n,
// with Cauchy data u(x^1, x0') = a(x^1), u_a(x^1, x0') = a_a(x^1).
//
// Coordinate indices are 0-based here: index 0 is x^1, indices 1..n-1 are the normal directions.

#include <optional>
#include <string>
#include <vector>

#include "ck/cauchy.hpp"
#include "ck/expr.hpp"
#include "ck/series.hpp"
#include "ck/system.hpp"

namespace ck {

struct MongeRhs {
  int n = 0;
  std::vector<Rational> x0;
  std::vector<std::vector<Expression>> f;  // (n-1) x (n-1), entry [a-1][b-1] for coordinates a, b >= 1

  static MongeRhs zero(int n);
  const Expression& at(int a, int b) const {
    return f[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
  }
  /// Shape, variables (x and t only) and symmetry.
  void validate() const;
};

struct MongeWitness {
  std::string condition;  // "t-form", "t-independent", "d1 g", "closedness"
  int alpha = 0, beta = 0, gamma = 0;  // 1-based coordinate labels, gamma 0 when unused
  std::string expression;

  std::string label() const;
};

struct MongeReport {
  int n = 0;
  bool linear_in_t = false;
  bool admissible = false;
  /// false for n = 2, where no conclusion about the right-hand side follows
  bool conclusive = true;
  std::string method;  // "rational-identity" or "germ-at-base-point"
  std::optional<std::vector<std::vector<Expression>>> g;
  std::vector<MongeWitness> witnesses;
  std::optional<TruncatedSeries> potential;

  std::string verdict() const;
};

TruncatedSeries delta_minor(const TruncatedSeries& u, int a, int b);

MongeReport classify_rhs(const MongeRhs& rhs, int potential_order = 8);

struct ReducedMonge {
  SystemSpec system;  // n unknowns u^i = u_i, k = 1
  std::string quadrature;
};

/// p0 and pprime0 default to the values of the data a = (x^1)^2 / 2, a_a = 0.
ReducedMonge reduce_to_first_order(const MongeRhs& rhs);

struct MongeData {
  TruncatedSeries a;                 // arity 1
  std::vector<TruncatedSeries> a_n;  // n - 1 series of arity 1
};

struct MongeSolution {
  TruncatedSeries u;                    // arity n, order N
  std::vector<TruncatedSeries> gradient;  // u^i from the first-order system, order N - 1
  SystemSpec reduced;
};

MongeSolution solve_full(const MongeRhs& rhs, const MongeData& data, int order);

struct RankProfile {
  bool rank_one = false;
  std::optional<int> alpha, beta;  // first nonzero minor (0-based coordinates)
  std::optional<MultiIndex> monomial;
  Rational value;
};

RankProfile hessian_rank_profile(const TruncatedSeries& u);

}  // namespace ck
