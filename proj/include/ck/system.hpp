#pragma once

// First-order systems u^A_alpha = F^A_alpha(x, u, u_Lambda) and their derivatives.
//
// Index conventions inside the library are 0-based: A in [0, m), tangential
// L in [0, k), normal a in [0, n - k) standing for the coordinate k + a.
// Expression syntax and reports use the 1-based names.

#include <map>
#include <string>
#include <vector>

#include "ck/expr.hpp"
#include "ck/rational.hpp"

namespace ck {

struct SamplePoint {
  std::vector<Rational> x;                 // n
  std::vector<Rational> p;                 // m
  std::vector<std::vector<Rational>> pd;   // m x k

  std::map<VarRef, Rational> env() const;
};

struct SystemSpec {
  Dims dims;
  std::vector<Rational> x0;
  std::vector<Rational> p0;
  std::vector<std::vector<Rational>> pprime0;   // m x k
  std::vector<std::vector<Expression>> F;       // m x (n - k)
  std::vector<Expression> guards;

  const Expression& rhs(int A, int a) const { return F[static_cast<std::size_t>(A)][static_cast<std::size_t>(a)]; }
  SamplePoint base_point() const { return {x0, p0, pprime0}; }
  bool has_primitives() const;

  /// Shape and bounds checks plus the guard condition at the base point.
  void validate() const;
};

/// Throws Error(guard_violation) when some guard vanishes (or cannot be evaluated) at the point.
void check_guards(const SystemSpec& sys, const SamplePoint& point);

/// Symbolic partial derivatives of every F^A_alpha.
class SystemCalculus {
 public:
  explicit SystemCalculus(const SystemSpec& sys);

  const SystemSpec& system() const { return *sys_; }
  const Expression& F(int A, int a) const { return sys_->rhs(A, a); }
  const Expression& Fx(int A, int a, int i) const { return dx_[idx(A, a)][static_cast<std::size_t>(i)]; }
  const Expression& Fp(int A, int a, int B) const { return dp_[idx(A, a)][static_cast<std::size_t>(B)]; }
  const Expression& Fpd(int A, int a, int B, int L) const {
    return dpd_[idx(A, a)][static_cast<std::size_t>(B * sys_->dims.k + L)];
  }

 private:
  std::size_t idx(int A, int a) const { return static_cast<std::size_t>(A * sys_->dims.normal_count() + a); }

  const SystemSpec* sys_;
  std::vector<std::vector<Expression>> dx_, dp_, dpd_;
};

/// Values of F and its first partial derivatives at a point.
class DerivativeValues {
 public:
  DerivativeValues(const SystemCalculus& calc, const SamplePoint& point);

  const Rational& F(int A, int a) const { return f_[idx(A, a)]; }
  const Rational& Fx(int A, int a, int i) const { return dx_[idx(A, a) * dims_.n + i]; }
  const Rational& Fp(int A, int a, int B) const { return dp_[idx(A, a) * dims_.m + B]; }
  const Rational& Fpd(int A, int a, int B, int L) const {
    return dpd_[(idx(A, a) * dims_.m + B) * dims_.k + L];
  }
  const Dims& dims() const { return dims_; }

 private:
  std::size_t idx(int A, int a) const { return static_cast<std::size_t>(A * dims_.normal_count() + a); }

  Dims dims_;
  std::vector<Rational> f_, dx_, dp_, dpd_;
};

}  // namespace ck
