#include <cctype>
#include <string>

#include "folsing/errors.hpp"
#include "folsing/expr.hpp"

namespace folsing {

namespace {

// Recursive descent over
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' integer)?
//   primary := number | identifier | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, int leaf_dim, int transverse_dim)
      : text_(text), leaf_dim_(leaf_dim), transverse_dim_(transverse_dim) {}

  Expr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Expr e = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected character '") + peek() + "'");
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column_); }

  Expr expr() {
    Expr left = term();
    for (;;) {
      skip_space();
      const char c = peek();
      if (c != '+' && c != '-') return left;
      advance();
      Expr right = term();
      left = c == '+' ? left + right : left - right;
    }
  }

  Expr term() {
    Expr left = unary();
    for (;;) {
      skip_space();
      if (peek() != '*') return left;
      advance();
      left = left * unary();
    }
  }

  Expr unary() {
    skip_space();
    if (peek() == '-') {
      advance();
      return -unary();
    }
    if (peek() == '+') {
      advance();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    if (peek() != '^') return base;
    advance();
    skip_space();
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be a nonnegative integer");
    unsigned long exponent = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      exponent = exponent * 10 + static_cast<unsigned long>(peek() - '0');
      if (exponent > 10000) fail("exponent too large");
      advance();
    }
    skip_space();
    if (peek() == '^') fail("chained exponents need parentheses");
    return pow(base, static_cast<unsigned>(exponent));
  }

  Expr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = peek();
    if (c == '(') {
      advance();
      Expr inner = expr();
      skip_space();
      if (peek() != ')') fail("expected ')'");
      advance();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const int line = line_;
    const int column = column_;
    std::string digits;
    bool seen_point = false;
    while (std::isdigit(static_cast<unsigned char>(peek())) || (peek() == '.' && !seen_point)) {
      if (peek() == '.') seen_point = true;
      digits.push_back(peek());
      advance();
    }
    if (digits == "." || digits.back() == '.') throw ParseError("malformed number", line, column);
    return Expr::constant(parse_rational(digits));
  }

  Expr identifier() {
    const int line = line_;
    const int column = column_;
    const char head = peek();
    advance();
    std::string index_text;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      index_text.push_back(peek());
      advance();
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || (head != 'x' && head != 'v') || index_text.empty() ||
        index_text.size() > 6) {
      throw ParseError("unknown identifier", line, column);
    }
    const int index = std::stoi(index_text);
    if (head == 'x') {
      if (index < 1 || index > leaf_dim_) throw ParseError("leaf variable x" + index_text + " out of range", line, column);
      return Expr::variable(index - 1);
    }
    if (index < 1 || index > transverse_dim_) {
      throw ParseError("transverse variable v" + index_text + " out of range", line, column);
    }
    return Expr::variable(leaf_dim_ + index - 1);
  }

  std::string_view text_;
  int leaf_dim_;
  int transverse_dim_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

Expr parse_expression(std::string_view text, int leaf_dim, int transverse_dim) {
  if (leaf_dim < 0 || transverse_dim < 0) throw InputError("chart dimensions must be nonnegative");
  return Parser(text, leaf_dim, transverse_dim).parse();
}

}  // namespace folsing
