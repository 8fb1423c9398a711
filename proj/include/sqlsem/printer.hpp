#pragma once

#include <set>
#include <string>

#include "sqlsem/ast.hpp"

namespace sqlsem {

/// Canonical query text: upper-case keywords, single spaces, minimal
/// parentheses that preserve precedence. Deterministic, and
/// parse(print(q)) is structurally equal to q.
std::string print(const Query& q);
std::string print(const Expr& e);

/// The distinct semantics-bearing keywords and operators appearing
/// anywhere in the tree. Literals are not keywords.
std::set<std::string> keywords_of(const Query& q);

}  // namespace sqlsem
