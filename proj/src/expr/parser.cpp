// Recursive-descent parser and the canonical printer.
//
// The printer is the inverse of the parser on raw ASTs: parse(to_string(e)) == e.
// Two lexical conventions make that work:
//   * an integer literal followed by '/' and another bare integer literal is
//     read as a single rational constant ("3/5");
//   * unary minus folds into constants and otherwise wraps as (-1)*e.

#include <cctype>

#include "ck/error.hpp"
#include "ck/expr.hpp"

namespace ck {

namespace {

Expression negate_raw(const Expression& e) {
  if (e.is_constant()) return Expression::constant(-e.value());
  return Expression::product({Expression::constant(-1), e});
}

struct Factor {
  Expression e;
  bool literal = false;   // integer literal, possibly negated, not raised to a power
  bool signed_ = false;   // literal carried a unary minus
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts) : s_(text), opts_(opts) {}

  Expression parse() {
    Expression e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Integer integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return Integer(std::string(s_.substr(start, pos_ - start)));
  }

  int small_index() {
    const std::size_t at = pos_;
    Integer v = integer();
    if (v > 100000) {
      pos_ = at;
      fail("index too large");
    }
    return static_cast<int>(v.get_si());
  }

  Expression expr() {
    std::vector<Expression> terms{term()};
    while (true) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(negate_raw(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : Expression::sum(std::move(terms));
  }

  Expression term() {
    Factor first = factor();
    Expression cur = first.e;
    bool literal = first.literal;
    std::vector<Expression> pending;
    auto flush = [&] {
      if (!pending.empty()) {
        cur = Expression::product(std::move(pending));
        pending.clear();
      }
    };
    while (true) {
      if (accept('*')) {
        Factor f = factor();
        if (pending.empty()) pending.push_back(cur);
        pending.push_back(f.e);
        literal = false;
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Factor f = factor();
        if (f.e.is_constant(0)) {
          pos_ = at;
          fail("division by zero");
        }
        if (pending.empty() && literal && f.literal && !f.signed_) {
          cur = Expression::constant(cur.value() / f.e.value());
        } else {
          flush();
          cur = Expression::quotient(cur, f.e);
        }
        literal = false;
      } else {
        break;
      }
    }
    flush();
    return cur;
  }

  Factor factor() {
    if (accept('-')) {
      Factor f = factor();
      return {negate_raw(f.e), f.literal, true};
    }
    Factor b = base();
    if (accept('^')) {
      const std::size_t at = pos_;
      Integer k = integer();
      if (k > 1000) {
        pos_ = at;
        fail("exponent too large");
      }
      return {Expression::power(b.e, static_cast<int>(k.get_si())), false, false};
    }
    return b;
  }

  Factor base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return {Expression::constant(Rational(integer())), true, false};
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return {e, false, false};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "x" || name == "p" || name == "pd" || name == "t") return {variable(name, start), false, false};
      if (auto fn = PrimitiveTable::instance().lookup(name)) {
        expect('(');
        Expression arg = expr();
        expect(')');
        return {Expression::apply(*fn, arg), false, false};
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression variable(const std::string& name, std::size_t start) {
    VarRef v;
    if (name == "t") {
      v = VarRef::t();
    } else {
      expect('[');
      const int a = small_index();
      expect(']');
      if (name == "x") {
        v = VarRef::x(a);
      } else if (name == "p") {
        v = VarRef::p(a);
      } else {
        expect('[');
        const int b = small_index();
        expect(']');
        v = VarRef::pd(a, b);
      }
    }
    try {
      check_bounds(v, opts_.dims, opts_.allow_t);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (at position " + std::to_string(start) + ")");
    }
    return Expression::variable(v);
  }

  std::string_view s_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

// ---- printer ---------------------------------------------------------------

bool is_integer(const Rational& q) { return q.get_den() == 1; }

bool is_negation(const Expression& e) {
  return e.kind() == NodeKind::product && e.children().size() == 2 && e.children()[0].is_constant(-1) &&
         !e.children()[1].is_constant();
}

bool is_compound(const Expression& e) {
  return e.kind() == NodeKind::sum || e.kind() == NodeKind::product || e.kind() == NodeKind::quotient;
}

std::string print(const Expression& e);

std::string wrap(const Expression& e) { return "(" + print(e) + ")"; }

std::string print_sum(const Expression& e) {
  std::string out;
  const auto& ch = e.children();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const Expression& c = ch[i];
    if (i == 0) {
      out += c.kind() == NodeKind::sum ? wrap(c) : print(c);
    } else if (c.is_constant() && c.value() < 0) {
      out += " - " + to_string(Rational(-c.value()));
    } else if (is_negation(c)) {
      const Expression& x = c.children()[1];
      out += " - " + (x.kind() == NodeKind::sum ? wrap(x) : print(x));
    } else {
      out += " + " + (c.kind() == NodeKind::sum ? wrap(c) : print(c));
    }
  }
  return out;
}

std::string print_product(const Expression& e) {
  if (is_negation(e)) {
    const Expression& x = e.children()[1];
    return "-" + (is_compound(x) ? wrap(x) : print(x));
  }
  std::string out;
  const auto& ch = e.children();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const Expression& c = ch[i];
    if (i > 0) out += "*";
    bool needs;
    if (i == 0) {
      needs = c.kind() == NodeKind::sum || c.kind() == NodeKind::product;
    } else {
      needs = is_compound(c) || (c.is_constant() && (c.value() < 0 || !is_integer(c.value())));
    }
    out += needs ? wrap(c) : print(c);
  }
  return out;
}

std::string print_quotient(const Expression& e) {
  const Expression& num = e.children()[0];
  const Expression& den = e.children()[1];
  std::string out = num.kind() == NodeKind::sum ? wrap(num) : print(num);
  bool wrap_den = is_compound(den);
  if (den.is_constant()) {
    wrap_den = den.value() < 0 || !is_integer(den.value()) || (num.is_constant() && is_integer(num.value()));
  }
  return out + "/" + (wrap_den ? wrap(den) : print(den));
}

std::string print_power(const Expression& e) {
  const Expression& b = e.children()[0];
  const bool plain = b.kind() == NodeKind::variable || b.kind() == NodeKind::primitive ||
                     (b.is_constant() && b.value() >= 0 && is_integer(b.value()));
  return (plain ? print(b) : wrap(b)) + "^" + std::to_string(e.exponent());
}

std::string print(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant: return to_string(e.value());
    case NodeKind::variable: return to_string(e.var());
    case NodeKind::sum: return print_sum(e);
    case NodeKind::product: return print_product(e);
    case NodeKind::quotient: return print_quotient(e);
    case NodeKind::power: return print_power(e);
    case NodeKind::primitive: return std::string(primitive_name(e.fn())) + "(" + print(e.children()[0]) + ")";
  }
  return "?";
}

}  // namespace

Expression parse_expression(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).parse();
}

std::string to_string(const Expression& e) { return print(e); }

}  // namespace ck
