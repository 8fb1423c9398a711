#pragma once

#include <string>
#include <vector>

#include "sqlsem/ast.hpp"
#include "sqlsem/value.hpp"

namespace sqlsem {

/// Paper mode follows the formal rules: natural-style shared-column
/// matching for outer joins (padded rows bypass the ON filter) and an
/// empty result for a natural join without shared columns. Standard mode
/// gives the conventional ON-driven behavior for harness experiments.
enum class JoinMode { Paper, Standard };

/// Single-rule fault injection for oracle-sensitivity experiments. Each
/// flag flips exactly one semantic rule in a copy of the engine; all
/// default off.
struct Faults {
    bool and_null_false_is_null = false;  // null AND false yields null
    bool is_false_on_null_is_null = false;  // NULL IS FALSE yields null
    bool substring_zero_based = false;    // SUBSTRING counts positions from 0
    bool mod_sign_of_divisor = false;     // MOD result takes the divisor's sign
    bool where_keeps_unknown = false;     // WHERE keeps rows with unknown condition
    bool except_all_unclamped = false;    // EXCEPT ALL multiplicity |x-y| instead of max(0,x-y)
    bool union_all_dedups = false;        // UNION ALL collapses duplicates

    bool any() const {
        return and_null_false_is_null || is_false_on_null_is_null || substring_zero_based ||
               mod_sign_of_divisor || where_keeps_unknown || except_all_unclamped ||
               union_all_dedups;
    }
};

struct ExecOptions {
    JoinMode join_mode = JoinMode::Paper;
    Faults faults;
    // When set, every semantic rule the execution actually dispatches is
    // appended here (rule ids in the coverage registry's format).
    std::vector<std::string>* rule_sink = nullptr;
};

/// One row scope the evaluator can resolve column references against.
struct Scope {
    const BagTable* table = nullptr;
    const Row* row = nullptr;
};

/// Row environment for expression evaluation: the innermost scope is
/// last; resolution walks inward-out, and ambiguity within one scope is
/// an error rather than a silent pick.
struct EvalEnv {
    const Catalog* catalog = nullptr;
    const ExecOptions* opts = nullptr;
    std::vector<Scope> scopes;
};

/// Result of grouping a table on one column: partitions keyed by the
/// grouping value, NULL keys forming one group, input order preserved.
struct GroupedTable {
    std::string key_column;
    std::vector<std::pair<Value, BagTable>> groups;
};

// Table-level operators (semantic rules 76-90). These are the building
// blocks execute() composes; they are exposed for tests.

/// Joins two tables. Qualified kinds require `on`; cross/natural forbid
/// it. For inner joins this returns the plain product -- the ON filter is
/// a separate pipeline step the executor applies afterwards.
BagTable op_join(JoinKind kind, const BagTable& t1, const BagTable& t2, const Expr* on,
                 EvalEnv& outer);

BagTable op_collection(SetOpKind op, const BagTable& t1, const BagTable& t2,
                       const Faults& faults = {});

/// distinct=true collapses every multiplicity to one; distinct=false is
/// the identity (ALL).
BagTable op_filter(bool distinct, const BagTable& t);

/// Aggregate over an already-projected table (single column except for
/// COUNT over the whole table). Empty or all-NULL input yields NULL for
/// MAX/MIN/SUM/AVG and 0 for COUNT.
Value aggregate_value(SelectModifier agg, const BagTable& projected);
BagTable op_aggregate(SelectModifier agg, const BagTable& projected, std::string out_attr);

GroupedTable op_group_by(const std::string& column, const BagTable& t);

/// Keeps exactly the rows whose condition evaluates to true (false and
/// unknown are both dropped), preserving multiplicity and order.
BagTable op_where(const Expr& cond, const BagTable& t, EvalEnv& outer);

/// Stable sort on one column; NULL keys first ascending, last descending.
BagTable op_order_by(const std::string& column, bool desc, const BagTable& t);

/// Positional projection onto named columns, preserving multiplicity and
/// order.
BagTable op_select_columns(const std::vector<std::string>& columns, const BagTable& t);

/// Executes a full query against a catalog: clauses run in the canonical
/// order JOIN, FROM, WHERE, GROUP BY, aggregates, HAVING, SELECT,
/// DISTINCT/ALL, ORDER BY; subqueries recurse with access to enclosing
/// row scopes.
BagTable execute(const Query& q, const Catalog& catalog, const ExecOptions& opts = {});

/// Subquery entry point: like execute() but inherits the enclosing
/// environment for correlated column references.
BagTable execute_subquery(const Query& q, EvalEnv& outer);

/// Resolves a column reference against the innermost scope that has a
/// match. Returns the value; throws UnknownColumn / AmbiguousColumn.
Value resolve_column(const std::string& ref, const EvalEnv& env);

/// Index of `ref` within one attribute list (with the owning table's name
/// for qualified matching); -1 when absent, throws on ambiguity.
int resolve_in_attrs(const std::string& ref, const std::vector<std::string>& attrs,
                     const std::string& table_name);

}  // namespace sqlsem
