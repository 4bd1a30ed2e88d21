#pragma once

// Pointwise checks for the differential ideal generated by
//   f^A_a = p^A_a - F^A_a,  eta^A = dp^A - p^A_i dx^i,  Omega^A = dp^A_i ^ dx^i
// on R^{n + m + nm}. Tangent vectors use the coordinate layout [x (n), p (m), p^A_j (A-major, m x n)].

#include <optional>
#include <vector>

#include "ck/cauchy.hpp"
#include "ck/system.hpp"

namespace ck {

struct JetPoint {
  std::vector<Rational> x;                 // n
  std::vector<Rational> p;                 // m
  std::vector<std::vector<Rational>> pj;   // m x n

  SamplePoint projected(int k) const;      // (x, p, p^A_L for L < k)
  static JetPoint from_jet(const std::vector<Rational>& x, const Jet2& jet);
};

/// Basis e~_a = d/dx^a + c^b_a d/dx^b + c^A_a d/dp^A + c^A_{aj} d/dp^A_j, a <= l < b.
struct IntegralElementBasis {
  int l = 0;
  std::vector<std::vector<Rational>> c_ab;                // l x (n - l), column b - l - 1
  std::vector<std::vector<Rational>> c_aA;                // l x m
  std::vector<std::vector<std::vector<Rational>>> c_aAj;  // l x m x n

  /// Tangent vectors of the jet graph of a 2-jet, combined as e_a + c^b_a e_b.
  static IntegralElementBasis from_jet(const Jet2& jet, int l, std::vector<std::vector<Rational>> c_ab);
  std::vector<std::vector<Rational>> vectors(int n, int m) const;
  void validate(int n, int m) const;
};

struct ElementResiduals {
  std::vector<std::vector<Rational>> f;                  // [A][alpha - k - 1]
  std::vector<std::vector<Rational>> g;                  // [A][a]
  std::vector<std::vector<std::vector<Rational>>> g_alpha;  // [A][alpha - k - 1][a]
  std::vector<std::vector<std::vector<Rational>>> h;     // [A][a][a']

  bool integral() const;
};

ElementResiduals element_residuals(const SystemSpec& sys, const JetPoint& z, const IntegralElementBasis& E);

struct PolarSpaceResult {
  int dimension = 0;
  std::vector<std::vector<Rational>> basis;  // vectors in R^{n + m + nm}
  /// When H(E) is a graph over the dx coordinates: row j is the vector of H(E) with d^i = delta^i_j.
  std::optional<std::vector<std::vector<Rational>>> graph;
  /// Whether the first k basis vectors project to a non-characteristic k-plane.
  bool noncharacteristic = false;
};

PolarSpaceResult polar_space(const SystemSpec& sys, const JetPoint& z, const IntegralElementBasis& E);

}  // namespace ck
