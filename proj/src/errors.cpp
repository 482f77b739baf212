#include "rw/errors.hpp"

namespace rw {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

BudgetExceeded::BudgetExceeded(const std::string& what_blows_up, const std::string& required,
                               const std::string& cap)
    : Error("enumeration budget exceeded: " + what_blows_up + " needs " + required +
            " evaluations, cap is " + cap),
      required_(required),
      cap_(cap) {}

}  // namespace rw
