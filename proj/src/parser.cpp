#include "rw/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <string>

#include "rw/errors.hpp"

namespace rw {
namespace {

enum class Tok {
  Ident,
  Number,   // digits, optional fractional part
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Dot,
  Bar,
  Slash,
  Plus,
  Minus,
  Star,
  Bang,
  Eq,       // =
  Neq,      // !=
  EqEq,     // ==
  Le,       // <=
  ApproxEq, // ~=
  ApproxLe, // <~
  Implies,  // =>
  Iff,      // <=>
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
  std::size_t offset;  // byte offset just past the token
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, co = col, start = i;
    auto push = [&](Tok k, std::size_t n) {
      advance(n);
      out.push_back({k, std::string(src.substr(start, n)), l, co, i});
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    bool dot_digit = c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || dot_digit) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      push(Tok::Number, j - i);
      continue;
    }
    if (starts("<=>")) { push(Tok::Iff, 3); continue; }
    if (starts("<=")) { push(Tok::Le, 2); continue; }
    if (starts("<~")) { push(Tok::ApproxLe, 2); continue; }
    if (starts("~=")) { push(Tok::ApproxEq, 2); continue; }
    if (starts("=>")) { push(Tok::Implies, 2); continue; }
    if (starts("==")) { push(Tok::EqEq, 2); continue; }
    if (starts("!=")) { push(Tok::Neq, 2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      case '|': push(Tok::Bar, 1); continue;
      case '/': push(Tok::Slash, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '!': push(Tok::Bang, 1); continue;
      case '=': push(Tok::Eq, 1); continue;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back({Tok::End, "", line, col, i});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"not",  "and",   "or",       "forall",   "exists", "exists_exactly",
                                       "true", "false", "prop",     "eps",      "predicate",
                                       "function", "const"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, Vocabulary vocab) : toks_(std::move(toks)), vocab_(std::move(vocab)) {}

  KnowledgeBase kb() {
    while (is_ident("predicate") || is_ident("function") || is_ident("const")) declaration();
    KnowledgeBase out;
    while (peek().kind != Tok::End) {
      if (is_ident("predicate") || is_ident("function") || is_ident("const"))
        fail("declarations must precede statements");
      out.statements.push_back(formula());
      expect(Tok::Dot, "'.' ending the statement");
    }
    out.vocab = vocab_;
    out.formula = Formula::all_of(out.statements);
    return out;
  }

  Formula query() {
    std::vector<Formula> parts;
    while (true) {
      parts.push_back(formula());
      if (peek().kind == Tok::Dot) {
        ++pos_;
        if (peek().kind == Tok::End) break;
        continue;
      }
      if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
      break;
    }
    return Formula::all_of(parts);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Vocabulary vocab_;
  std::vector<std::string> scope_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is_ident(const char* word, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == word;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(msg, t.line, t.col);
  }
  // Well-formed text that names an unknown symbol, the wrong arity or an
  // unbound variable.
  [[noreturn]] void symbol_fail(const Token& t, const std::string& msg) const {
    throw SymbolError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      std::string seen = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      fail(std::string("expected ") + what + ", found " + seen);
    }
    return toks_[pos_++];
  }
  void expect_word(const char* word) {
    if (!is_ident(word)) fail(std::string("expected '") + word + "'");
    ++pos_;
  }
  std::string name(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    if (keywords().count(t.text)) fail_at(t, "'" + t.text + "' is a reserved word");
    return t.text;
  }
  unsigned natural(const char* what) {
    const Token& t = expect(Tok::Number, what);
    if (t.text.find('.') != std::string::npos) fail_at(t, std::string("expected an integer for ") + what);
    unsigned long v = 0;
    try {
      v = std::stoul(t.text);
    } catch (const std::exception&) {
      fail_at(t, "integer out of range");
    }
    if (v > 1000000) fail_at(t, "integer out of range");
    return static_cast<unsigned>(v);
  }

  void declaration() {
    const Token& kw = toks_[pos_++];
    do {
      const Token& at = peek();
      std::string n = name("a symbol name");
      try {
        if (kw.text == "const") {
          vocab_.add_constant(n);
        } else {
          expect(Tok::Slash, "'/' before the arity");
          unsigned a = natural("the arity");
          if (kw.text == "predicate")
            vocab_.add_predicate(n, a);
          else
            vocab_.add_function(n, a);
        }
      } catch (const SymbolError& e) {
        symbol_fail(at, e.what());
      }
      if (peek().kind != Tok::Comma) break;
      ++pos_;
    } while (true);
    expect(Tok::Semi, "';' ending the declaration");
  }

  bool bound(const std::string& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (*it == v) return true;
    return false;
  }

  // ------------------------------------------------------------ formulas

  Formula formula() {
    Formula lhs = implication();
    while (peek().kind == Tok::Iff) {
      ++pos_;
      lhs = Formula::biconditional(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      ++pos_;
      return Formula::implication(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (is_ident("or")) {
      ++pos_;
      lhs = Formula::disjunction(std::move(lhs), conjunction());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (is_ident("and")) {
      ++pos_;
      lhs = Formula::conjunction(std::move(lhs), unary());
    }
    return lhs;
  }

  Formula quantified(FormulaKind kind, unsigned count) {
    const Token& at = peek();
    std::string v = name("a variable after the quantifier");
    if (vocab_.declares(v)) fail_at(at, "'" + v + "' is a declared symbol, not a variable");
    scope_.push_back(v);
    Formula body = unary();
    scope_.pop_back();
    switch (kind) {
      case FormulaKind::Forall: return Formula::forall(v, std::move(body));
      case FormulaKind::Exists: return Formula::exists(v, std::move(body));
      case FormulaKind::ExistsUnique: return Formula::exists_unique(v, std::move(body));
      default: return Formula::exists_exactly(count, v, std::move(body));
    }
  }

  Formula unary() {
    if (is_ident("not")) {
      ++pos_;
      return Formula::negation(unary());
    }
    if (is_ident("forall")) {
      ++pos_;
      return quantified(FormulaKind::Forall, 0);
    }
    if (is_ident("exists")) {
      const Token& kw = toks_[pos_++];
      if (peek().kind == Tok::Bang && peek().line == kw.line && peek().col == kw.col + 6) {
        ++pos_;
        return quantified(FormulaKind::ExistsUnique, 1);
      }
      return quantified(FormulaKind::Exists, 0);
    }
    if (is_ident("exists_exactly")) {
      ++pos_;
      expect(Tok::LBracket, "'[' after exists_exactly");
      const Token& at = peek();
      unsigned n = natural("the count");
      if (n == 0) fail_at(at, "exists_exactly needs a positive count");
      expect(Tok::RBracket, "']'");
      return quantified(FormulaKind::ExistsExactly, n);
    }
    return primary();
  }

  bool starts_expression() const {
    const Token& t = peek();
    if (t.kind == Tok::Number || t.kind == Tok::Minus) return true;
    return t.kind == Tok::Ident && (t.text == "prop" || t.text == "eps");
  }

  Formula primary() {
    if (is_ident("true")) {
      ++pos_;
      return Formula::truth();
    }
    if (is_ident("false")) {
      ++pos_;
      return Formula::falsity();
    }
    if (peek().kind == Tok::LParen) {
      // Either a parenthesized formula or a comparison whose left operand is
      // parenthesized; try the comparison first.
      std::size_t save = pos_;
      auto scope = scope_;
      try {
        return comparison();
      } catch (const Error&) {
        pos_ = save;
        scope_ = std::move(scope);
      }
      ++pos_;
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (starts_expression()) return comparison();
    if (peek().kind == Tok::Ident) {
      const Token& at = peek();
      if (auto arity = vocab_.predicate_arity(at.text)) {
        ++pos_;
        std::vector<Term> args = arguments(at);
        if (args.size() != *arity)
          symbol_fail(at, "predicate '" + at.text + "' expects " + std::to_string(*arity) + " argument(s), got " +
                          std::to_string(args.size()));
        return Formula::predicate(at.text, std::move(args));
      }
      Term lhs = term();
      if (peek().kind == Tok::Eq) {
        ++pos_;
        return Formula::equal(std::move(lhs), term());
      }
      if (peek().kind == Tok::Neq) {
        ++pos_;
        return Formula::negation(Formula::equal(std::move(lhs), term()));
      }
      fail("expected '=' or '!=' after a term");
    }
    fail(peek().kind == Tok::End ? "unexpected end of input" : "unexpected '" + peek().text + "'");
  }

  std::vector<Term> arguments(const Token& head) {
    expect(Tok::LParen, "'(' after the symbol");
    std::vector<Term> args;
    if (peek().kind == Tok::RParen) fail_at(head, "'" + head.text + "' needs arguments");
    args.push_back(term());
    while (peek().kind == Tok::Comma) {
      ++pos_;
      args.push_back(term());
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  Term term() {
    const Token& at = peek();
    if (at.kind != Tok::Ident) fail("expected a term");
    if (keywords().count(at.text)) fail("'" + at.text + "' cannot be used as a term");
    ++pos_;
    if (vocab_.has_constant(at.text)) return Term::constant(at.text);
    if (auto arity = vocab_.function_arity(at.text)) {
      std::vector<Term> args = arguments(at);
      if (args.size() != *arity)
        symbol_fail(at, "function '" + at.text + "' expects " + std::to_string(*arity) + " argument(s), got " +
                        std::to_string(args.size()));
      return Term::apply(at.text, std::move(args));
    }
    if (vocab_.predicate_arity(at.text)) symbol_fail(at, "predicate '" + at.text + "' used as a term");
    if (peek().kind == Tok::LParen) symbol_fail(at, "undeclared symbol '" + at.text + "'");
    if (!bound(at.text)) {
      bool looks_like_symbol = std::isupper(static_cast<unsigned char>(at.text[0]));
      symbol_fail(at, looks_like_symbol ? "undeclared symbol '" + at.text + "'"
                                    : "unbound variable '" + at.text + "'");
    }
    return Term::variable(at.text);
  }

  // ------------------------------------------------------------ comparisons

  Formula comparison() {
    ExprPtr lhs = expression();
    const Token& op = peek();
    CompareOp cop;
    bool approx = false;
    switch (op.kind) {
      case Tok::ApproxEq: cop = CompareOp::ApproxEq; approx = true; break;
      case Tok::ApproxLe: cop = CompareOp::ApproxLe; approx = true; break;
      case Tok::EqEq: cop = CompareOp::Eq; break;
      case Tok::Le: cop = CompareOp::Le; break;
      default: fail("expected a comparison '~=[i]' or '<~[i]'");
    }
    ++pos_;
    unsigned index = 0;
    if (approx) {
      expect(Tok::LBracket, "'[' with the tolerance index");
      const Token& at = peek();
      index = natural("the tolerance index");
      if (index == 0) fail_at(at, "tolerance indices start at 1");
      expect(Tok::RBracket, "']'");
    }
    ExprPtr rhs = expression();
    return Formula::compare(std::move(lhs), cop, std::move(rhs), index);
  }

  ExprPtr expression() {
    ExprPtr lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool plus = peek().kind == Tok::Plus;
      ++pos_;
      ExprPtr rhs = product();
      lhs = plus ? Expr::sum(std::move(lhs), std::move(rhs)) : Expr::difference(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr product() {
    ExprPtr lhs = factor();
    while (peek().kind == Tok::Star) {
      ++pos_;
      lhs = Expr::product(std::move(lhs), factor());
    }
    return lhs;
  }

  Rational number() {
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      negative = true;
      ++pos_;
    }
    const Token& t = expect(Tok::Number, "a number");
    std::string text = t.text;
    if (peek().kind == Tok::Slash) {
      if (text.find('.') != std::string::npos) fail("a fraction needs integer parts");
      ++pos_;
      const Token& d = expect(Tok::Number, "a denominator");
      if (d.text.find('.') != std::string::npos) fail_at(d, "a fraction needs integer parts");
      text += "/" + d.text;
    }
    try {
      Rational r = Rational::parse(text);
      return negative ? -r : r;
    } catch (const Error& e) {
      fail_at(t, e.what());
    }
  }

  ExprPtr factor() {
    if (peek().kind == Tok::Number || peek().kind == Tok::Minus) return Expr::literal(number());
    if (peek().kind == Tok::LParen) {
      ++pos_;
      ExprPtr e = expression();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (is_ident("eps")) {
      ++pos_;
      expect(Tok::LBracket, "'[' after eps");
      const Token& at = peek();
      unsigned i = natural("the tolerance index");
      if (i == 0) fail_at(at, "tolerance indices start at 1");
      expect(Tok::RBracket, "']'");
      return Expr::tolerance(i);
    }
    if (is_ident("prop")) return proportion();
    fail("expected an expression");
  }

  ExprPtr proportion() {
    const Token& head = toks_[pos_++];
    expect(Tok::LBrace, "'{' after prop");
    // The subscript comes after the body, so skip ahead to read it before
    // parsing the body with those variables in scope.
    std::size_t depth = 0, j = pos_;
    for (; j < toks_.size(); ++j) {
      if (toks_[j].kind == Tok::LBrace) ++depth;
      if (toks_[j].kind == Tok::RBrace) {
        if (depth == 0) break;
        --depth;
      }
      if (toks_[j].kind == Tok::End) fail_at(head, "unterminated prop{...}");
    }
    std::size_t body_start = pos_;
    pos_ = j + 1;
    expect(Tok::LBracket, "'[' with the proportion variables");
    std::vector<std::string> vars;
    std::set<std::string> seen;
    while (true) {
      const Token& at = peek();
      std::string v = name("a variable");
      if (vocab_.declares(v)) fail_at(at, "'" + v + "' is a declared symbol, not a variable");
      if (!seen.insert(v).second) fail_at(at, "variable '" + v + "' repeated in the subscript");
      vars.push_back(v);
      if (peek().kind != Tok::Comma) break;
      ++pos_;
    }
    expect(Tok::RBracket, "']'");
    std::size_t after = pos_;

    pos_ = body_start;
    scope_.insert(scope_.end(), vars.begin(), vars.end());
    Formula psi = formula();
    std::optional<Formula> theta;
    if (peek().kind == Tok::Bar) {
      ++pos_;
      theta = formula();
    }
    scope_.resize(scope_.size() - vars.size());
    if (pos_ != j) fail("expected '}' closing the proportion");
    pos_ = after;
    if (theta) return Expr::conditional(std::move(psi), std::move(*theta), std::move(vars));
    return Expr::proportion(std::move(psi), std::move(vars));
  }
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) { return Parser(lex(text), Vocabulary{}).kb(); }

Formula parse_formula(std::string_view text, const Vocabulary& vocab) { return Parser(lex(text), vocab).query(); }

}  // namespace rw
