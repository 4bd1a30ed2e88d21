#pragma once

// Cauchy problem u^A_alpha = F^A_alpha(x, u, u_Lambda), u^A(x^Lambda, x0^alpha) = a^A(x^Lambda).
//
// All series are germs at the base point: variable y_i stands for x^i - x0^i.
// Data series have arity k (variables y_1..y_k), solutions arity n.

#include <optional>
#include <string>
#include <vector>

#include "ck/compat.hpp"
#include "ck/error.hpp"
#include "ck/linalg.hpp"
#include "ck/series.hpp"
#include "ck/system.hpp"

namespace ck {

struct CauchyData {
  std::vector<TruncatedSeries> a;  // m series of arity k

  int order() const;
};

/// Values a^A, a^A_L, a^A_{LG} of the data at the base point.
struct DataJet2 {
  std::vector<Rational> a;                              // m
  std::vector<std::vector<Rational>> a1;                // m x k
  std::vector<std::vector<std::vector<Rational>>> a2;   // m x k x k, symmetric

  static DataJet2 from(const CauchyData& data);
};

/// Values u^A, u^A_i, u^A_{ij} at the base point.
struct Jet2 {
  std::vector<Rational> u;                              // m
  std::vector<std::vector<Rational>> u1;                // m x n
  std::vector<std::vector<std::vector<Rational>>> u2;   // m x n x n, symmetric

  friend bool operator==(const Jet2&, const Jet2&) = default;
};

/// c^alpha_Lambda stored as (n - k) rows of k entries.
struct Slope {
  std::vector<std::vector<Rational>> c;

  static Slope zero(const Dims& d);
  const Rational& at(int a, int L) const { return c[static_cast<std::size_t>(a)][static_cast<std::size_t>(L)]; }
};

struct SlopeCheck {
  bool noncharacteristic = false;
  Rational determinant;
  RationalMatrix V;  // rows (A, alpha), columns (B, beta)
};

/// Raised when the second-derivative block of an approximate jet is not symmetric.
class IncompatibleError : public Error {
 public:
  IncompatibleError(const std::string& what, std::vector<Witness> witnesses)
      : Error(ErrorCode::incompatible, what), witnesses_(std::move(witnesses)) {}
  const std::vector<Witness>& witnesses() const { return witnesses_; }

 private:
  std::vector<Witness> witnesses_;
};

/// Raised when a computed solution leaves a nonzero residual.
class ResidualError : public Error {
 public:
  ResidualError(const std::string& what, int equation_A, int equation_alpha, MultiIndex monomial, Rational value)
      : Error(ErrorCode::residual, what),
        A_(equation_A),
        alpha_(equation_alpha),
        monomial_(std::move(monomial)),
        value_(std::move(value)) {}
  int equation_A() const { return A_; }
  int equation_alpha() const { return alpha_; }
  const MultiIndex& monomial() const { return monomial_; }
  const Rational& value() const { return value_; }

 private:
  int A_, alpha_;
  MultiIndex monomial_;
  Rational value_;
};

Jet2 approximate_jet(const SystemSpec& sys, const DataJet2& data);

/// True when approximate_jet succeeds for every data 2-jet compatible with the base point.
bool approximately_solvable(const SystemSpec& sys);

SlopeCheck slope_noncharacteristic(const SystemSpec& sys, const Slope& slope, const SamplePoint& point);
SlopeCheck slope_noncharacteristic(const SystemSpec& sys, const Slope& slope);

Jet2 tilted_approximate_jet(const SystemSpec& sys, const Slope& slope, const DataJet2& data);

struct SolutionSeries {
  Dims dims;
  int order = 0;
  std::vector<TruncatedSeries> u;  // m series of arity n
};

struct Residual {
  std::vector<TruncatedSeries> equations;  // m x (n - k), A-major, order N - 1
  std::vector<TruncatedSeries> data;       // m, order N

  bool clean() const;
  /// Lowest degree carrying a nonzero residual term, if any.
  std::optional<int> lowest_degree() const;
};

/// Checks a^A(0) = p0^A and a^A_L(0) = p'0^A_L.
void check_data(const SystemSpec& sys, const CauchyData& data);

SolutionSeries solve(const SystemSpec& sys, const CauchyData& data, int order);
Residual residual(const SystemSpec& sys, const SolutionSeries& u, const CauchyData& data);

/// The system in coordinates x~^L = x^L, x~^a = x^a - c^a_L (x^L - x0^L), where the tilted plane
/// becomes x~^a = x0^a. Requires every F to be affine in the pd variables.
SystemSpec tilt_system(const SystemSpec& sys, const Slope& slope);

/// u(y) = u~(y_L, y_a - c^a_L y_L): brings a solution of the tilted system back.
SolutionSeries pullback(const SolutionSeries& tilted, const Slope& slope);

/// Data for the tilted system induced by a solution: u restricted to the plane y_a = c^a_L y_L.
CauchyData restrict_to_plane(const SolutionSeries& u, const Slope& slope);

}  // namespace ck
