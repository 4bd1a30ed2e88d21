#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ck/expr.hpp"
#include "ck/system.hpp"

namespace ck {

/// Phi^A_{ab} and Psi^{A G L}_{a b C} at one point (0-based indices, a/b normal).
struct CompatTensors {
  Dims dims;
  std::vector<Rational> phi;
  std::vector<Rational> psi;

  std::size_t phi_index(int A, int a, int b) const {
    const int r = dims.normal_count();
    return static_cast<std::size_t>((A * r + a) * r + b);
  }
  std::size_t psi_index(int A, int G, int L, int a, int b, int C) const {
    const int r = dims.normal_count();
    return static_cast<std::size_t>(((((A * dims.k + G) * dims.k + L) * r + a) * r + b) * dims.m + C);
  }
  const Rational& Phi(int A, int a, int b) const { return phi[phi_index(A, a, b)]; }
  const Rational& Psi(int A, int G, int L, int a, int b, int C) const { return psi[psi_index(A, G, L, a, b, C)]; }
};

CompatTensors phi_psi(const SystemSpec& sys, const SamplePoint& point);
CompatTensors phi_psi(const SystemCalculus& calc, const SamplePoint& point);

struct Witness {
  std::string tensor;              // "phi" or "psi"
  std::vector<int> indices;        // 1-based: phi (A, alpha, beta); psi (A, Gamma, Lambda, alpha, beta, C)
  std::optional<std::size_t> point;
  Rational difference;             // value minus the alpha/beta swapped value (sampled witnesses)
  std::string symbolic;            // numerator of the difference (symbolic witnesses)

  std::string label() const;
};

struct SymbolicVerdict {
  std::string method;              // "rational-identity" or "germ-at-base-point"
  bool holds = true;
  int order = 0;                   // expansion order used by the germ check
  std::vector<Witness> witnesses;
};

struct CompatOptions {
  int samples = 16;
  std::uint64_t seed = 0;
  int order = 8;
  bool symbolic = true;
};

struct CompatReport {
  Dims dims;
  std::uint64_t seed = 0;
  std::vector<SamplePoint> points;
  std::vector<CompatTensors> tensors;
  std::vector<Witness> witnesses;
  std::optional<SymbolicVerdict> symbolic;

  bool compatible_at_samples() const { return witnesses.empty(); }
  /// Sampled verdict combined with the symbolic one when present.
  bool compatible() const { return witnesses.empty() && (!symbolic || symbolic->holds); }
  std::string verdict() const { return witnesses.empty() ? "compatible-at-samples" : "violated"; }
};

CompatReport check_compatibility(const SystemSpec& sys, const CompatOptions& options = {});

/// Operators L^A_{aB} = delta^A_B d/dx^{k+a} + sum_L xi^{A L}_{a B}(x) d/dx^L.
struct LinearFieldSystem {
  Dims dims;
  std::vector<Rational> x0;
  std::vector<Expression> xi;      // layout [A][L][a][B]

  std::size_t xi_index(int A, int L, int a, int B) const {
    return static_cast<std::size_t>(((A * dims.k + L) * dims.normal_count() + a) * dims.m + B);
  }
  const Expression& coefficient(int A, int L, int a, int B) const { return xi[xi_index(A, L, a, B)]; }

  /// All coefficients zero.
  static LinearFieldSystem zero(const Dims& dims, std::vector<Rational> x0);
  void validate() const;
};

SystemSpec from_linear_fields(const LinearFieldSystem& lf);
bool bracket_check(const LinearFieldSystem& lf);

}  // namespace ck
