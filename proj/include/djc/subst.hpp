#pragma once

#include <map>
#include <string>

#include "djc/ast.hpp"

namespace djc {

/// Simultaneous substitution of values for free variables. Binders (let)
/// shadow as usual; `this` is an ordinary substitutable name. Values are
/// closed, so substitution is trivially capture-avoiding. Untouched
/// subtrees are shared with the input term.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, Value>& bind);

}  // namespace djc
