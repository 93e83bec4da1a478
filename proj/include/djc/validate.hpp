#pragma once

#include <string>
#include <vector>

#include "djc/ast.hpp"

namespace djc {

struct ValidationIssue {
  std::string message;
  int line = 0, col = 0;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Static checks: unique class/field/method/param names, resolvable class
/// references in types / new / field accesses / calls where the receiver
/// class is statically known, argument arity for new (one per declared
/// field), presence of a well-shaped entry class `Main` (zero-parameter
/// run(), no fields, no constructor body), and variable scoping.
/// Empty report == valid.
ValidationReport validate_program(const Program& p);

/// Lookup used by the Call rule; returns nullptr when absent.
const MethodDef* lookup_method(const Program& p, const std::string& cls,
                               const std::string& method);

}  // namespace djc
