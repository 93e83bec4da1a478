#pragma once

#include <string>

#include "djc/ast.hpp"

namespace djc {

/// Renders an expression in surface syntax. The grammar has no
/// parenthesized-expression form, so receivers must be postfix chains
/// (literal/variable/new/get/set/call/monitor ops); let/if receivers
/// cannot occur in parsed programs and are rejected with an exception.
std::string print_expr(const Expr& e);

/// Renders a whole program; parse_program(print_program(p)) == p.
std::string print_program(const Program& p);

}  // namespace djc
