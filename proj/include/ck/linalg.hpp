#pragma once

// Exact dense linear algebra over the rationals. Rank decisions are exact.

#include <cstddef>
#include <optional>
#include <vector>

#include "ck/rational.hpp"

namespace ck {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(const std::vector<std::vector<Rational>>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<Rational> row(std::size_t r) const;
  std::vector<Rational> column(std::size_t c) const;
  bool is_symmetric() const;
  RationalMatrix transposed() const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct RowEchelon {
  RationalMatrix reduced;              ///< reduced row echelon form
  std::vector<std::size_t> pivots;     ///< pivot column of each nonzero row
};

RowEchelon row_reduce(RationalMatrix m);
std::size_t rank(const RationalMatrix& m);
Rational determinant(const RationalMatrix& m);

/// Basis of {v : m v = 0}; one vector per free column.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m);

struct LinearSolveResult {
  enum class Status { unique, inconsistent, underdetermined } status;
  std::vector<Rational> solution;                 ///< set when unique
  std::optional<std::size_t> inconsistent_row;    ///< an original equation index witnessing inconsistency
};

LinearSolveResult solve_linear(const RationalMatrix& a, const std::vector<Rational>& b);

/// Rank of a list of vectors of equal length.
std::size_t span_rank(const std::vector<std::vector<Rational>>& vectors, std::size_t dim);

/// True when every vector of `inner` lies in the span of `outer`.
bool span_contains(const std::vector<std::vector<Rational>>& outer,
                   const std::vector<std::vector<Rational>>& inner, std::size_t dim);

}  // namespace ck
