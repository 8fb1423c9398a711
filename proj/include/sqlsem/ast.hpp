#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqlsem/value.hpp"

namespace sqlsem {

struct Expr;
struct Query;
using ExprPtr = std::shared_ptr<Expr>;
using QueryPtr = std::shared_ptr<Query>;

enum class ExprKind {
    Literal,    // NULL / true / false / number / string
    Column,     // possibly dotted reference
    And,        // kids: 2
    Or,         // kids: 2
    Xor,        // kids: 2
    Not,        // kids: 1
    IsTest,     // kids: 1; is_op + negated
    Compare,    // kids: 2; cmp
    Between,    // kids: subject, lo, hi; negated
    InList,     // kids: subject, elem...; negated
    Exists,     // sub
    Arith,      // kids: 2; arith
    Mod,        // kids: 2
    Power,      // kids: 2
    Length,     // kids: 1; spelling
    Abs,        // kids: 1
    Ln,         // kids: 1
    ExpFn,      // kids: 1
    Sqrt,       // kids: 1
    Floor,      // kids: 1
    Ceil,       // kids: 1; spelling
    Concat,     // kids: 2
    Substring,  // kids: string, start
    Trim,       // kids: 1; trim_side
    Fold,       // kids: 1; fold_upper
    Case,       // kids: cond, then, else
    Cast,       // kids: 1; cast_type
    Subquery,   // sub (scalar position)
};

enum class CompareOp { Eq, Ne, Lt, Gt, Le, Ge };
enum class ArithOp { Add, Sub, Mul, Div };
enum class IsOp { True, False, Unknown, Null };
enum class LengthSpelling { Length, CharLength, CharacterLength };
enum class CeilSpelling { Ceil, Ceiling };
enum class CastType { String, Numeric, Boolean };

struct Expr {
    ExprKind kind;
    Value lit;
    std::string name;  // Column
    CompareOp cmp = CompareOp::Eq;
    ArithOp arith = ArithOp::Add;
    IsOp is_op = IsOp::True;
    bool negated = false;       // IsTest / Between / InList
    LengthSpelling length_spelling = LengthSpelling::Length;
    CeilSpelling ceil_spelling = CeilSpelling::Ceil;
    bool trim_left = true;      // Trim: LTRIM vs RTRIM
    bool fold_upper = true;     // Fold: UPPER vs LOWER
    CastType cast_type = CastType::String;
    std::vector<ExprPtr> kids;
    QueryPtr sub;  // Exists / Subquery
};

// Node builders. Each enforces the production's child arity.
ExprPtr lit(Value v);
ExprPtr col(std::string name);
ExprPtr logic(ExprKind kind, ExprPtr a, ExprPtr b);  // And/Or/Xor
ExprPtr not_of(ExprPtr a);
ExprPtr is_test(ExprPtr a, IsOp op, bool negated);
ExprPtr compare(CompareOp op, ExprPtr a, ExprPtr b);
ExprPtr between(ExprPtr subject, ExprPtr lo, ExprPtr hi, bool negated);
ExprPtr in_list(ExprPtr subject, std::vector<ExprPtr> elems, bool negated);
ExprPtr exists(QueryPtr sub);
ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b);
ExprPtr binary_fn(ExprKind kind, ExprPtr a, ExprPtr b);  // Mod/Power/Concat/Substring
ExprPtr unary_fn(ExprKind kind, ExprPtr a);              // Length..Ceil/Trim/Fold/Cast
ExprPtr case_when(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
ExprPtr cast_as(ExprPtr a, CastType type);
ExprPtr scalar_subquery(QueryPtr sub);

enum class SetOpKind { Union, UnionAll, Intersect, IntersectAll, Except, ExceptAll };
enum class JoinKind { Cross, Natural, Inner, Left, Right, Full };

/// SELECT modifier slot, production (12): either a filter op or an
/// aggregate function, never both.
enum class SelectModifier { None, Distinct, All, Max, Min, Sum, Count, Avg };

bool modifier_is_aggregate(SelectModifier m);

/// One ⟨tref⟩: a plain table name or a two-table joined table.
/// Cross/natural joins carry no ON; qualified joins carry exactly one.
struct TableRef {
    bool joined = false;
    std::string table;  // plain ref
    JoinKind kind = JoinKind::Cross;
    std::string left, right;
    ExprPtr on;  // null unless qualified join
};

struct OrderBy {
    std::string column;
    bool desc = false;
};

struct SelectCore {
    SelectModifier modifier = SelectModifier::None;
    bool star = false;
    std::vector<ExprPtr> items;     // empty iff star
    std::vector<TableRef> from;     // empty means a one-row, zero-column source
    ExprPtr where;                  // optional
    std::optional<std::string> group_by;
    ExprPtr having;                 // only with group_by
};

/// A full query expression, production (1): a select body or a collection
/// of exactly two queries, plus at most one ORDER BY at this level.
struct Query {
    std::shared_ptr<SelectCore> core;  // exactly one of core/set is set
    struct SetOp {
        SetOpKind op;
        QueryPtr left, right;
    };
    std::shared_ptr<SetOp> set;
    std::optional<OrderBy> order_by;

    bool is_set() const { return set != nullptr; }
};

QueryPtr make_select(std::shared_ptr<SelectCore> core, std::optional<OrderBy> order = {});
QueryPtr make_set(SetOpKind op, QueryPtr left, QueryPtr right, std::optional<OrderBy> order = {});

bool expr_equal(const Expr& a, const Expr& b);
bool query_equal(const Query& a, const Query& b);

ExprPtr clone_expr(const Expr& e);
QueryPtr clone_query(const Query& q);

/// True for expressions with no column references or subqueries anywhere.
bool expr_is_constant(const Expr& e);

const char* compare_op_text(CompareOp op);
const char* set_op_text(SetOpKind op);
const char* join_kind_text(JoinKind kind);

}  // namespace sqlsem
