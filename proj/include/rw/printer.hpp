#pragma once

#include <string>

#include "rw/logic.hpp"

namespace rw {

/// Fully parenthesized text that parse_formula reads back to the same AST.
std::string print_formula(const Formula& f);
std::string print_expr(const Expr& e);
std::string print_term(const Term& t);
std::string print_exact(const ExactFormula& f);

/// Declaration block ("predicate P/1;" ...) in declaration order.
std::string print_vocabulary(const Vocabulary& v);

/// Declarations followed by one statement per line.
std::string print_kb(const Vocabulary& v, const Formula& f);

}  // namespace rw
