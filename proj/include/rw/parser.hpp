#pragma once

// Surface syntax for knowledge bases (.rwkb) and queries.
//
//   kb        := decl* statement*
//   decl      := "predicate" Name "/" arity ("," Name "/" arity)* ";"
//              | "function"  Name "/" arity ("," Name "/" arity)* ";"
//              | "const" Name ("," Name)* ";"
//   statement := formula "."
//
// Connectives, loosest first: "<=>", "=>" (right associative), "or", "and",
// then the prefix forms "not", "forall x", "exists x", "exists! x",
// "exists_exactly[n] x" whose body is the next unary formula. Comparisons are
// "e ~=[i] e" and "e <~[i] e"; the exact language adds "e == e", "e <= e" and
// "eps[i]". Expressions: literals (4/5, 0.8, -1/2), "prop{psi}[x,y]",
// "prop{psi | theta}[x]", "+", "-", "*" and parentheses. "#" starts a comment.

#include <string_view>
#include <vector>

#include "rw/logic.hpp"

namespace rw {

struct KnowledgeBase {
  Vocabulary vocab;
  std::vector<Formula> statements;
  Formula formula;  // conjunction of the statements
};

/// Parses a whole KB file. Throws ParseError or SymbolError.
KnowledgeBase parse_kb(std::string_view text);

/// Parses a closed formula against a declared vocabulary. A trailing "." is
/// optional; several "."-terminated statements are conjoined.
Formula parse_formula(std::string_view text, const Vocabulary& vocab);

}  // namespace rw
