#pragma once

#include <stdexcept>
#include <string>

#include "djc/ast.hpp"

namespace djc {

/// Raised on malformed surface syntax; carries 1-based line/column.
struct ParseError : std::runtime_error {
  int line, col;
  ParseError(std::string msg, int l, int c)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + std::move(msg)),
        line(l),
        col(c) {}
};

/// Parses a whole program in the surface syntax. Throws ParseError.
Program parse_program(const std::string& text);

/// Parses a single expression (used by tests). Throws ParseError.
ExprPtr parse_expr_text(const std::string& text);

}  // namespace djc
