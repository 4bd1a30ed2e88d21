#include "ck/rational.hpp"

#include <cctype>
#include <cstdio>

#include "ck/error.hpp"

namespace ck {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::index_range: return "index-range";
    case ErrorCode::unbound_variable: return "unbound-variable";
    case ErrorCode::division_by_zero: return "division-by-zero-constant-term";
    case ErrorCode::inadmissible_primitive: return "inadmissible-base-value";
    case ErrorCode::arity_mismatch: return "arity-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::guard_violation: return "guard-violation";
    case ErrorCode::incompatible: return "incompatible";
    case ErrorCode::characteristic: return "characteristic";
    case ErrorCode::residual: return "residual";
    case ErrorCode::unsolvable: return "unsolvable";
    case ErrorCode::input: return "input";
  }
  return "unknown";
}

namespace {

bool parse_integer(std::string_view text, Integer& out) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) return false;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) return false;
  }
  out = Integer(std::string(text.substr(i)), 10);
  if (negative) out = -out;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  Integer num, den = 1;
  const auto slash = text.find('/');
  const bool ok = slash == std::string_view::npos
                      ? parse_integer(text, num)
                      : parse_integer(trim(text.substr(0, slash)), num) &&
                            parse_integer(trim(text.substr(slash + 1)), den);
  if (!ok) throw Error(ErrorCode::input, "malformed rational '" + std::string(text) + "'");
  if (den == 0) throw Error(ErrorCode::input, "zero denominator in '" + std::string(text) + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q, int significant) {
  mpf_class f(q, 256);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, f.get_d());
  return buf;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) {
    return std::nullopt;
  }
  Integer n = sqrt(q.get_num());
  Integer d = sqrt(q.get_den());
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Rational factorial(int k) {
  Integer f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

Rational binomial(const Rational& r, int k) {
  Rational acc = 1;
  for (int i = 0; i < k; ++i) {
    acc *= (r - i);
    acc /= (i + 1);
  }
  return acc;
}

}  // namespace ck
