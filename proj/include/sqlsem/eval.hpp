#pragma once

#include "sqlsem/ast.hpp"
#include "sqlsem/exec.hpp"

namespace sqlsem {

// Three-valued connectives over BOOL/NULL values (Kleene logic).
Value kleene_and(const Value& a, const Value& b, const Faults& faults = {});
Value kleene_or(const Value& a, const Value& b);
Value kleene_xor(const Value& a, const Value& b);
Value kleene_not(const Value& a);

/// Evaluates an expression to its natural-domain value. Callers needing a
/// particular domain funnel the result through the implicit casts below.
Value eval_value(const Expr& e, EvalEnv& env);

/// Boolean evaluation: eval_value followed by cast_to_bool. Result is
/// BOOL or NULL.
Value eval_bool(const Expr& e, EvalEnv& env);

/// Numeric evaluation: eval_value followed by cast_to_num. INT/FLOAT/NULL.
Value eval_num(const Expr& e, EvalEnv& env);

/// String evaluation: eval_value followed by cast_to_str. STR/NULL.
Value eval_str(const Expr& e, EvalEnv& env);

}  // namespace sqlsem
