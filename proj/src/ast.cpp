#include "sqlsem/ast.hpp"

#include <cassert>

namespace sqlsem {

namespace {

ExprPtr node(ExprKind kind) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    return e;
}

}  // namespace

ExprPtr lit(Value v) {
    auto e = node(ExprKind::Literal);
    e->lit = std::move(v);
    return e;
}

ExprPtr col(std::string name) {
    auto e = node(ExprKind::Column);
    e->name = std::move(name);
    return e;
}

ExprPtr logic(ExprKind kind, ExprPtr a, ExprPtr b) {
    assert(kind == ExprKind::And || kind == ExprKind::Or || kind == ExprKind::Xor);
    auto e = node(kind);
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr not_of(ExprPtr a) {
    auto e = node(ExprKind::Not);
    e->kids = {std::move(a)};
    return e;
}

ExprPtr is_test(ExprPtr a, IsOp op, bool negated) {
    auto e = node(ExprKind::IsTest);
    e->is_op = op;
    e->negated = negated;
    e->kids = {std::move(a)};
    return e;
}

ExprPtr compare(CompareOp op, ExprPtr a, ExprPtr b) {
    auto e = node(ExprKind::Compare);
    e->cmp = op;
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr between(ExprPtr subject, ExprPtr lo, ExprPtr hi, bool negated) {
    auto e = node(ExprKind::Between);
    e->negated = negated;
    e->kids = {std::move(subject), std::move(lo), std::move(hi)};
    return e;
}

ExprPtr in_list(ExprPtr subject, std::vector<ExprPtr> elems, bool negated) {
    assert(!elems.empty());
    auto e = node(ExprKind::InList);
    e->negated = negated;
    e->kids.push_back(std::move(subject));
    for (auto& elem : elems) e->kids.push_back(std::move(elem));
    return e;
}

ExprPtr exists(QueryPtr sub) {
    auto e = node(ExprKind::Exists);
    e->sub = std::move(sub);
    return e;
}

ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b) {
    auto e = node(ExprKind::Arith);
    e->arith = op;
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr binary_fn(ExprKind kind, ExprPtr a, ExprPtr b) {
    assert(kind == ExprKind::Mod || kind == ExprKind::Power || kind == ExprKind::Concat ||
           kind == ExprKind::Substring);
    auto e = node(kind);
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr unary_fn(ExprKind kind, ExprPtr a) {
    auto e = node(kind);
    e->kids = {std::move(a)};
    return e;
}

ExprPtr case_when(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
    auto e = node(ExprKind::Case);
    e->kids = {std::move(cond), std::move(then_e), std::move(else_e)};
    return e;
}

ExprPtr cast_as(ExprPtr a, CastType type) {
    auto e = node(ExprKind::Cast);
    e->cast_type = type;
    e->kids = {std::move(a)};
    return e;
}

ExprPtr scalar_subquery(QueryPtr sub) {
    auto e = node(ExprKind::Subquery);
    e->sub = std::move(sub);
    return e;
}

bool modifier_is_aggregate(SelectModifier m) {
    switch (m) {
        case SelectModifier::Max:
        case SelectModifier::Min:
        case SelectModifier::Sum:
        case SelectModifier::Count:
        case SelectModifier::Avg: return true;
        default: return false;
    }
}

QueryPtr make_select(std::shared_ptr<SelectCore> core, std::optional<OrderBy> order) {
    auto q = std::make_shared<Query>();
    q->core = std::move(core);
    q->order_by = std::move(order);
    return q;
}

QueryPtr make_set(SetOpKind op, QueryPtr left, QueryPtr right, std::optional<OrderBy> order) {
    auto q = std::make_shared<Query>();
    q->set = std::make_shared<Query::SetOp>(Query::SetOp{op, std::move(left), std::move(right)});
    q->order_by = std::move(order);
    return q;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Literal:
            if (a.lit.kind() != b.lit.kind() || !value_identical(a.lit, b.lit)) return false;
            break;
        case ExprKind::Column:
            if (a.name != b.name) return false;
            break;
        case ExprKind::IsTest:
            if (a.is_op != b.is_op || a.negated != b.negated) return false;
            break;
        case ExprKind::Compare:
            if (a.cmp != b.cmp) return false;
            break;
        case ExprKind::Between:
        case ExprKind::InList:
            if (a.negated != b.negated) return false;
            break;
        case ExprKind::Arith:
            if (a.arith != b.arith) return false;
            break;
        case ExprKind::Length:
            if (a.length_spelling != b.length_spelling) return false;
            break;
        case ExprKind::Ceil:
            if (a.ceil_spelling != b.ceil_spelling) return false;
            break;
        case ExprKind::Trim:
            if (a.trim_left != b.trim_left) return false;
            break;
        case ExprKind::Fold:
            if (a.fold_upper != b.fold_upper) return false;
            break;
        case ExprKind::Cast:
            if (a.cast_type != b.cast_type) return false;
            break;
        default: break;
    }
    if (a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i) {
        if (!expr_equal(*a.kids[i], *b.kids[i])) return false;
    }
    if ((a.sub == nullptr) != (b.sub == nullptr)) return false;
    if (a.sub && !query_equal(*a.sub, *b.sub)) return false;
    return true;
}

namespace {

bool table_ref_equal(const TableRef& a, const TableRef& b) {
    if (a.joined != b.joined) return false;
    if (!a.joined) return a.table == b.table;
    if (a.kind != b.kind || a.left != b.left || a.right != b.right) return false;
    if ((a.on == nullptr) != (b.on == nullptr)) return false;
    return !a.on || expr_equal(*a.on, *b.on);
}

}  // namespace

bool query_equal(const Query& a, const Query& b) {
    if (a.order_by.has_value() != b.order_by.has_value()) return false;
    if (a.order_by &&
        (a.order_by->column != b.order_by->column || a.order_by->desc != b.order_by->desc)) {
        return false;
    }
    if (a.is_set() != b.is_set()) return false;
    if (a.is_set()) {
        return a.set->op == b.set->op && query_equal(*a.set->left, *b.set->left) &&
               query_equal(*a.set->right, *b.set->right);
    }
    const SelectCore& x = *a.core;
    const SelectCore& y = *b.core;
    if (x.modifier != y.modifier || x.star != y.star) return false;
    if (x.items.size() != y.items.size()) return false;
    for (size_t i = 0; i < x.items.size(); ++i) {
        if (!expr_equal(*x.items[i], *y.items[i])) return false;
    }
    if (x.from.size() != y.from.size()) return false;
    for (size_t i = 0; i < x.from.size(); ++i) {
        if (!table_ref_equal(x.from[i], y.from[i])) return false;
    }
    if ((x.where == nullptr) != (y.where == nullptr)) return false;
    if (x.where && !expr_equal(*x.where, *y.where)) return false;
    if (x.group_by != y.group_by) return false;
    if ((x.having == nullptr) != (y.having == nullptr)) return false;
    if (x.having && !expr_equal(*x.having, *y.having)) return false;
    return true;
}

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_shared<Expr>(e);
    out->kids.clear();
    for (const ExprPtr& kid : e.kids) out->kids.push_back(clone_expr(*kid));
    if (e.sub) out->sub = clone_query(*e.sub);
    return out;
}

QueryPtr clone_query(const Query& q) {
    auto out = std::make_shared<Query>();
    out->order_by = q.order_by;
    if (q.is_set()) {
        out->set = std::make_shared<Query::SetOp>(
            Query::SetOp{q.set->op, clone_query(*q.set->left), clone_query(*q.set->right)});
        return out;
    }
    auto core = std::make_shared<SelectCore>();
    core->modifier = q.core->modifier;
    core->star = q.core->star;
    for (const ExprPtr& item : q.core->items) core->items.push_back(clone_expr(*item));
    for (const TableRef& ref : q.core->from) {
        TableRef r = ref;
        if (ref.on) r.on = clone_expr(*ref.on);
        core->from.push_back(std::move(r));
    }
    if (q.core->where) core->where = clone_expr(*q.core->where);
    core->group_by = q.core->group_by;
    if (q.core->having) core->having = clone_expr(*q.core->having);
    out->core = std::move(core);
    return out;
}

bool expr_is_constant(const Expr& e) {
    if (e.kind == ExprKind::Column || e.sub) return false;
    for (const ExprPtr& kid : e.kids) {
        if (!expr_is_constant(*kid)) return false;
    }
    return true;
}

const char* compare_op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Gt: return ">";
        case CompareOp::Le: return "<=";
        case CompareOp::Ge: return ">=";
    }
    return "=";
}

const char* set_op_text(SetOpKind op) {
    switch (op) {
        case SetOpKind::Union: return "UNION";
        case SetOpKind::UnionAll: return "UNION ALL";
        case SetOpKind::Intersect: return "INTERSECT";
        case SetOpKind::IntersectAll: return "INTERSECT ALL";
        case SetOpKind::Except: return "EXCEPT";
        case SetOpKind::ExceptAll: return "EXCEPT ALL";
    }
    return "UNION";
}

const char* join_kind_text(JoinKind kind) {
    switch (kind) {
        case JoinKind::Cross: return "CROSS JOIN";
        case JoinKind::Natural: return "NATURAL JOIN";
        case JoinKind::Inner: return "INNER JOIN";
        case JoinKind::Left: return "LEFT JOIN";
        case JoinKind::Right: return "RIGHT JOIN";
        case JoinKind::Full: return "FULL JOIN";
    }
    return "CROSS JOIN";
}

}  // namespace sqlsem
