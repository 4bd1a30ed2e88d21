#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ck {

enum class ErrorCode {
  syntax,
  index_range,
  unbound_variable,
  division_by_zero,
  inadmissible_primitive,
  arity_mismatch,
  invalid_argument,
  guard_violation,
  incompatible,
  characteristic,
  residual,
  unsolvable,
  input,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorCode::syntax, what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ck
