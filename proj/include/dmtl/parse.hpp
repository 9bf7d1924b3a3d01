#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/dataset.hpp"

namespace dmtl {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

namespace detail {

struct Token {
  enum class Kind { Ident, Quoted, Number, Inf, LParen, RParen, LBracket, RBracket,
                    Comma, At, Dot, Arrow, End } kind;
  std::string text;  // ident/quoted content, or signed numeric/inf lexeme
  std::size_t line = 1, column = 1;
};

// Lexer for both program and dataset files. `%` starts a line comment.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_blank();
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= src_.size()) {
      current_.kind = Token::Kind::End;
      current_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (c == '(') return punct(Token::Kind::LParen);
    if (c == ')') return punct(Token::Kind::RParen);
    if (c == '[') return punct(Token::Kind::LBracket);
    if (c == ']') return punct(Token::Kind::RBracket);
    if (c == ',') return punct(Token::Kind::Comma);
    if (c == '@') return punct(Token::Kind::At);
    if (c == '.') return punct(Token::Kind::Dot);
    if (c == ':') {
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        current_.kind = Token::Kind::Arrow;
        current_.text = ":-";
        consume();
        consume();
        return;
      }
      throw ParseError("unexpected ':'", line_, column_);
    }
    if (c == '"') {
      consume();
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        text += src_[pos_];
        consume();
      }
      if (pos_ >= src_.size()) throw ParseError("unterminated string literal", line_, column_);
      consume();
      current_.kind = Token::Kind::Quoted;
      current_.text = std::move(text);
      return;
    }
    if (c == '+' || c == '-') {
      std::string sign(1, c);
      consume();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        current_.kind = Token::Kind::Number;
        current_.text = sign + scan_number();
        return;
      }
      if (src_.substr(pos_, 3) == "inf") {
        consume();
        consume();
        consume();
        current_.kind = Token::Kind::Inf;
        current_.text = sign + "inf";
        return;
      }
      throw ParseError("expected a number or 'inf' after sign", line_, column_);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      current_.kind = Token::Kind::Number;
      current_.text = scan_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_')) {
        text += src_[pos_];
        consume();
      }
      current_.kind = Token::Kind::Ident;
      current_.text = std::move(text);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
  }

  std::string scan_number() {
    std::string text;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        text += src_[pos_];
        consume();
      }
    };
    digits();
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == '/')) {
      // A '.' followed by a non-digit is a rule terminator, not a fraction.
      if (src_[pos_] == '/' ||
          (pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        text += src_[pos_];
        consume();
        digits();
      }
    }
    return text;
  }

  void punct(Token::Kind kind) {
    current_.kind = kind;
    current_.text = src_[pos_];
    consume();
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') consume();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, column_ = 1;
  Token current_;
};

inline bool is_operator_keyword(const std::string& s) {
  return s == "Diamondminus" || s == "Diamondplus" || s == "Boxminus" || s == "Boxplus" ||
         s == "Since" || s == "Until" || s == "Top" || s == "Bottom";
}

inline bool valid_constant(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Token::Kind peek_kind() const { return lex_.peek().kind; }
  const Token& peek() const { return lex_.peek(); }
  Token next() { return lex_.next(); }

  Token expect(Token::Kind kind, const char* what) {
    if (lex_.peek().kind != kind) fail(std::string("expected ") + what);
    return lex_.next();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, lex_.peek().line, lex_.peek().column);
  }

  Endpoint parse_endpoint() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Inf) {
      Token tok = next();
      return tok.text[0] == '-' ? Endpoint::neg_inf() : Endpoint::pos_inf();
    }
    if (t.kind == Token::Kind::Number) {
      Token tok = next();
      auto r = Rational::parse(tok.text);
      if (!r) throw ParseError("malformed number '" + tok.text + "'", tok.line, tok.column);
      return Endpoint::finite(*r);
    }
    fail("expected a rational or 'inf' endpoint");
  }

  Interval parse_interval() {
    const Token& open = peek();
    if (open.kind != Token::Kind::LBracket && open.kind != Token::Kind::LParen)
      fail("expected an interval");
    bool lc = open.kind == Token::Kind::LBracket;
    std::size_t line = open.line, column = open.column;
    next();
    Endpoint left = parse_endpoint();
    expect(Token::Kind::Comma, "','");
    Endpoint right = parse_endpoint();
    bool rc;
    if (peek_kind() == Token::Kind::RBracket) {
      rc = true;
      next();
    } else if (peek_kind() == Token::Kind::RParen) {
      rc = false;
      next();
    } else {
      fail("expected ']' or ')'");
    }
    if (!left.is_finite() && lc) throw ParseError("infinite endpoint must be open", line, column);
    if (!right.is_finite() && rc) throw ParseError("infinite endpoint must be open", line, column);
    auto iv = Interval::try_make(left, right, lc, rc);
    if (!iv) throw ParseError("empty interval", line, column);
    return *iv;
  }

  Interval parse_operator_range() {
    const Token& open = peek();
    std::size_t line = open.line, column = open.column;
    Interval iv = parse_interval();
    if (!iv.left().is_finite() || iv.left().value() < Rational(0))
      throw ParseError("operator range must contain only non-negative rationals", line, column);
    return iv;
  }

 private:
  Lexer lex_;
};

}  // namespace detail

struct ParsedProgram {
  Program program;
  std::vector<std::string> warnings;
};

namespace detail {

class ProgramParser : Parser {
 public:
  explicit ProgramParser(std::string_view src) : Parser(src) {}

  ParsedProgram run() {
    ParsedProgram out;
    std::size_t rule_counter = 0;
    while (peek_kind() != Token::Kind::End) {
      Rule rule = parse_rule();
      ++rule_counter;
      rule.name = "r" + std::to_string(rule_counter);
      const RelationalAtom* head_atom = head_relational(rule.head);
      if (head_atom == nullptr) {
        out.warnings.push_back("rule " + rule.name +
                               " has a Top head and derives nothing; dropped");
        continue;
      }
      SafetyReport safety = check_safety(rule);
      if (!safety.ok)
        fail("unsafe rule: variable '" + safety.unbound.front() +
             "' not bound in body outside Since/Until left operands");
      record_arities(out.program, rule);
      out.program.rules.push_back(std::move(rule));
    }
    return out;
  }

 private:
  Rule parse_rule() {
    Rule rule;
    const Token& start = peek();
    std::size_t line = start.line, column = start.column;
    rule.head = parse_metric_atom();
    validate_head(rule.head, line, column);
    expect(Token::Kind::Arrow, "':-'");
    rule.body.push_back(parse_metric_atom());
    while (peek_kind() == Token::Kind::Comma) {
      next();
      rule.body.push_back(parse_metric_atom());
    }
    expect(Token::Kind::Dot, "'.' at end of rule");
    return rule;
  }

  void validate_head(const MetricAtom& head, std::size_t line, std::size_t column) {
    switch (head.op()) {
      case MetricOp::Top:
      case MetricOp::Rel:
        return;
      case MetricOp::Bottom:
        throw ParseError("Bottom is not allowed in rule heads", line, column);
      case MetricOp::BoxMinus:
      case MetricOp::BoxPlus:
        validate_head(head.arg(), line, column);
        return;
      default:
        throw ParseError(
            "rule head must be Top, a relational atom, or Boxminus/Boxplus over a head", line,
            column);
    }
  }

  MetricAtom parse_metric_atom() {
    MetricAtom left = parse_primary();
    while (peek_kind() == Token::Kind::Ident &&
           (peek().text == "Since" || peek().text == "Until")) {
      Token op = next();
      Interval range = parse_operator_range();
      MetricAtom right = parse_primary();
      left = MetricAtom::binary(op.text == "Since" ? MetricOp::Since : MetricOp::Until,
                                std::move(range), std::move(left), std::move(right));
    }
    return left;
  }

  MetricAtom parse_primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::LParen) {
      next();
      MetricAtom inner = parse_metric_atom();
      expect(Token::Kind::RParen, "')'");
      return inner;
    }
    if (t.kind != Token::Kind::Ident) fail("expected a metric atom");
    if (t.text == "Top") {
      next();
      return MetricAtom::top();
    }
    if (t.text == "Bottom") {
      next();
      return MetricAtom::bottom();
    }
    if (t.text == "Diamondminus" || t.text == "Diamondplus" || t.text == "Boxminus" ||
        t.text == "Boxplus") {
      Token op = next();
      Interval range = parse_operator_range();
      MetricAtom arg = parse_primary();
      MetricOp kind = op.text == "Diamondminus" ? MetricOp::DiamondMinus
                      : op.text == "Diamondplus" ? MetricOp::DiamondPlus
                      : op.text == "Boxminus"    ? MetricOp::BoxMinus
                                                 : MetricOp::BoxPlus;
      return MetricAtom::unary(kind, std::move(range), std::move(arg));
    }
    if (t.text == "Since" || t.text == "Until") fail("misplaced infix operator");
    return MetricAtom::rel(parse_relational());
  }

  RelationalAtom parse_relational() {
    Token name = expect(Token::Kind::Ident, "a predicate name");
    RelationalAtom atom{name.text, {}};
    if (peek_kind() == Token::Kind::LParen) {
      next();
      atom.terms.push_back(parse_term());
      while (peek_kind() == Token::Kind::Comma) {
        next();
        atom.terms.push_back(parse_term());
      }
      expect(Token::Kind::RParen, "')'");
    }
    return atom;
  }

  // In rule files unquoted identifiers are variables; constants are quoted.
  Term parse_term() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) {
      if (is_operator_keyword(t.text)) fail("reserved word used as a term");
      return Term::variable(next().text);
    }
    if (t.kind == Token::Kind::Quoted) {
      Token tok = next();
      if (!valid_constant(tok.text))
        throw ParseError("constant literal must be a plain identifier", tok.line, tok.column);
      return Term::constant(tok.text);
    }
    fail("expected a term");
  }

  void record_arities(Program& program, const Rule& rule) {
    auto record = [&](const RelationalAtom& a, bool) {
      auto [it, fresh] = program.arities.emplace(a.predicate, a.terms.size());
      if (!fresh && it->second != a.terms.size())
        fail("predicate '" + a.predicate + "' used with arity " + std::to_string(a.terms.size()) +
             " but earlier with " + std::to_string(it->second));
    };
    rule.head.visit_relational(record);
    for (const MetricAtom& b : rule.body) b.visit_relational(record);
  }
};

class DatasetParser : Parser {
 public:
  explicit DatasetParser(std::string_view src) : Parser(src) {}

  Dataset run() {
    Dataset data;
    std::map<std::string, std::size_t> arities;
    while (peek_kind() != Token::Kind::End) {
      Fact f = parse_fact_body(arities);
      data.insert(f);
    }
    return data;
  }

  Fact parse_single_fact() {
    std::map<std::string, std::size_t> arities;
    Fact f = parse_fact_body(arities);
    if (peek_kind() != Token::Kind::End) fail("trailing input after fact");
    return f;
  }

 private:
  Fact parse_fact_body(std::map<std::string, std::size_t>& arities) {
    Token name = expect(Token::Kind::Ident, "a predicate name");
    if (is_operator_keyword(name.text))
      throw ParseError("reserved word used as a predicate", name.line, name.column);
    GroundAtom atom{name.text, {}};
    if (peek_kind() == Token::Kind::LParen) {
      next();
      atom.args.push_back(parse_constant());
      while (peek_kind() == Token::Kind::Comma) {
        next();
        atom.args.push_back(parse_constant());
      }
      expect(Token::Kind::RParen, "')'");
    }
    auto [it, fresh] = arities.emplace(atom.predicate, atom.args.size());
    if (!fresh && it->second != atom.args.size())
      throw ParseError("predicate '" + atom.predicate + "' used with arity " +
                           std::to_string(atom.args.size()) + " but earlier with " +
                           std::to_string(it->second),
                       name.line, name.column);
    expect(Token::Kind::At, "'@'");
    Interval iv = parse_fact_interval();
    return Fact{std::move(atom), std::move(iv)};
  }

  // `@t` is sugar for `@[t,t]`.
  Interval parse_fact_interval() {
    if (peek_kind() == Token::Kind::Number) {
      Token t = next();
      auto r = Rational::parse(t.text);
      if (!r) throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
      return Interval::punctual(*r);
    }
    return parse_interval();
  }

  std::string parse_constant() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) {
      if (is_operator_keyword(t.text)) fail("reserved word used as a constant");
      return next().text;
    }
    if (t.kind == Token::Kind::Quoted) {
      Token tok = next();
      if (!valid_constant(tok.text))
        throw ParseError("constant literal must be a plain identifier", tok.line, tok.column);
      return tok.text;
    }
    fail("expected a constant");
  }
};

}  // namespace detail

inline ParsedProgram parse_program(std::string_view text) {
  return detail::ProgramParser(text).run();
}

inline Dataset parse_dataset(std::string_view text) {
  return detail::DatasetParser(text).run();
}

inline Fact parse_fact(std::string_view text) {
  return detail::DatasetParser(text).parse_single_fact();
}

inline std::string render(const Program& p) { return p.str(); }

inline std::string render(const Dataset& d) {
  std::string out;
  for (const Fact& f : d.facts()) out += f.str() + "\n";
  return out;
}

}  // namespace dmtl
