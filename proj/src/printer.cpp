#include "sqlsem/printer.hpp"

#include "sqlsem/fixture.hpp"

namespace sqlsem {

namespace {

// Binding tightness; mirrors the parser's levels.
enum Level {
    kLevelOr = 1,
    kLevelXor = 2,
    kLevelAnd = 3,
    kLevelNot = 4,
    kLevelPredicate = 5,
    kLevelConcat = 6,
    kLevelAdditive = 7,
    kLevelMultiplicative = 8,
    kLevelPrimary = 9,
};

int level_of(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Or: return kLevelOr;
        case ExprKind::Xor: return kLevelXor;
        case ExprKind::And: return kLevelAnd;
        case ExprKind::Not: return kLevelNot;
        case ExprKind::Compare:
        case ExprKind::IsTest:
        case ExprKind::Between:
        case ExprKind::InList: return kLevelPredicate;
        case ExprKind::Concat: return kLevelConcat;
        case ExprKind::Arith:
            return (e.arith == ArithOp::Add || e.arith == ArithOp::Sub) ? kLevelAdditive
                                                                        : kLevelMultiplicative;
        default: return kLevelPrimary;
    }
}

std::string literal_text(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return "NULL";
        case ValueKind::Bool: return v.as_bool() ? "TRUE" : "FALSE";
        case ValueKind::Int:
        case ValueKind::Float: return num_to_text(v);
        case ValueKind::Str: return cell_text(v);
    }
    return "NULL";
}

void print_expr(const Expr& e, int min_level, std::string& out);
void print_query(const Query& q, std::string& out);

// Prints a child expression, parenthesizing when its level binds looser
// than the context requires.
void child(const Expr& e, int min_level, std::string& out) {
    if (level_of(e) < min_level) {
        out += '(';
        print_expr(e, 0, out);
        out += ')';
    } else {
        print_expr(e, 0, out);
    }
}

void print_expr(const Expr& e, int, std::string& out) {
    switch (e.kind) {
        case ExprKind::Literal: out += literal_text(e.lit); return;
        case ExprKind::Column: out += e.name; return;
        case ExprKind::Or:
            child(*e.kids[0], kLevelOr, out);
            out += " OR ";
            child(*e.kids[1], kLevelOr + 1, out);
            return;
        case ExprKind::Xor:
            child(*e.kids[0], kLevelXor, out);
            out += " XOR ";
            child(*e.kids[1], kLevelXor + 1, out);
            return;
        case ExprKind::And:
            child(*e.kids[0], kLevelAnd, out);
            out += " AND ";
            child(*e.kids[1], kLevelAnd + 1, out);
            return;
        case ExprKind::Not:
            out += "NOT ";
            child(*e.kids[0], kLevelNot, out);
            return;
        case ExprKind::Compare:
            child(*e.kids[0], kLevelPredicate, out);
            out += ' ';
            out += compare_op_text(e.cmp);
            out += ' ';
            child(*e.kids[1], kLevelPredicate + 1, out);
            return;
        case ExprKind::IsTest: {
            child(*e.kids[0], kLevelPredicate, out);
            out += " IS ";
            if (e.negated) out += "NOT ";
            switch (e.is_op) {
                case IsOp::True: out += "TRUE"; break;
                case IsOp::False: out += "FALSE"; break;
                case IsOp::Unknown: out += "UNKNOWN"; break;
                case IsOp::Null: out += "NULL"; break;
            }
            return;
        }
        case ExprKind::Between:
            child(*e.kids[0], kLevelPredicate, out);
            if (e.negated) out += " NOT";
            out += " BETWEEN ";
            child(*e.kids[1], kLevelPredicate + 1, out);
            out += " AND ";
            child(*e.kids[2], kLevelPredicate + 1, out);
            return;
        case ExprKind::InList: {
            child(*e.kids[0], kLevelPredicate, out);
            if (e.negated) out += " NOT";
            out += " IN (";
            for (size_t i = 1; i < e.kids.size(); ++i) {
                if (i > 1) out += ", ";
                print_expr(*e.kids[i], 0, out);
            }
            out += ')';
            return;
        }
        case ExprKind::Exists:
            out += "EXISTS (";
            print_query(*e.sub, out);
            out += ')';
            return;
        case ExprKind::Arith: {
            int lv = level_of(e);
            child(*e.kids[0], lv, out);
            switch (e.arith) {
                case ArithOp::Add: out += " + "; break;
                case ArithOp::Sub: out += " - "; break;
                case ArithOp::Mul: out += " * "; break;
                case ArithOp::Div: out += " / "; break;
            }
            child(*e.kids[1], lv + 1, out);
            return;
        }
        case ExprKind::Concat:
            child(*e.kids[0], kLevelConcat, out);
            out += " || ";
            child(*e.kids[1], kLevelConcat + 1, out);
            return;
        case ExprKind::Mod:
        case ExprKind::Power: {
            out += e.kind == ExprKind::Mod ? "MOD(" : "POWER(";
            print_expr(*e.kids[0], 0, out);
            out += ", ";
            print_expr(*e.kids[1], 0, out);
            out += ')';
            return;
        }
        case ExprKind::Length:
            switch (e.length_spelling) {
                case LengthSpelling::Length: out += "LENGTH("; break;
                case LengthSpelling::CharLength: out += "CHAR_LENGTH("; break;
                case LengthSpelling::CharacterLength: out += "CHARACTER_LENGTH("; break;
            }
            print_expr(*e.kids[0], 0, out);
            out += ')';
            return;
        case ExprKind::Abs:
        case ExprKind::Ln:
        case ExprKind::ExpFn:
        case ExprKind::Sqrt:
        case ExprKind::Floor: {
            const char* name = e.kind == ExprKind::Abs     ? "ABS("
                               : e.kind == ExprKind::Ln    ? "LN("
                               : e.kind == ExprKind::ExpFn ? "EXP("
                               : e.kind == ExprKind::Sqrt  ? "SQRT("
                                                           : "FLOOR(";
            out += name;
            print_expr(*e.kids[0], 0, out);
            out += ')';
            return;
        }
        case ExprKind::Ceil:
            out += e.ceil_spelling == CeilSpelling::Ceil ? "CEIL(" : "CEILING(";
            print_expr(*e.kids[0], 0, out);
            out += ')';
            return;
        case ExprKind::Substring:
            out += "SUBSTRING(";
            print_expr(*e.kids[0], 0, out);
            out += " FROM ";
            print_expr(*e.kids[1], 0, out);
            out += ')';
            return;
        case ExprKind::Trim:
            out += e.trim_left ? "LTRIM(" : "RTRIM(";
            print_expr(*e.kids[0], 0, out);
            out += ')';
            return;
        case ExprKind::Fold:
            out += e.fold_upper ? "UPPER(" : "LOWER(";
            print_expr(*e.kids[0], 0, out);
            out += ')';
            return;
        case ExprKind::Case:
            out += "CASE WHEN ";
            print_expr(*e.kids[0], 0, out);
            out += " THEN ";
            print_expr(*e.kids[1], 0, out);
            out += " ELSE ";
            print_expr(*e.kids[2], 0, out);
            out += " END";
            return;
        case ExprKind::Cast:
            out += "CAST(";
            print_expr(*e.kids[0], 0, out);
            out += " AS ";
            switch (e.cast_type) {
                case CastType::String: out += "string"; break;
                case CastType::Numeric: out += "numeric"; break;
                case CastType::Boolean: out += "boolean"; break;
            }
            out += ')';
            return;
        case ExprKind::Subquery:
            out += '(';
            print_query(*e.sub, out);
            out += ')';
            return;
    }
}

const char* modifier_text(SelectModifier m) {
    switch (m) {
        case SelectModifier::Distinct: return "DISTINCT";
        case SelectModifier::All: return "ALL";
        case SelectModifier::Max: return "MAX";
        case SelectModifier::Min: return "MIN";
        case SelectModifier::Sum: return "SUM";
        case SelectModifier::Count: return "COUNT";
        case SelectModifier::Avg: return "AVG";
        default: return "";
    }
}

void print_core(const SelectCore& core, std::string& out) {
    out += "SELECT ";
    bool aggregate = modifier_is_aggregate(core.modifier);
    if (core.modifier != SelectModifier::None && !aggregate) {
        out += modifier_text(core.modifier);
        out += ' ';
    }
    if (aggregate) {
        // normalized function-call surface form
        out += modifier_text(core.modifier);
        out += '(';
    }
    if (core.star) {
        out += '*';
    } else {
        for (size_t i = 0; i < core.items.size(); ++i) {
            if (i) out += ", ";
            print_expr(*core.items[i], 0, out);
        }
    }
    if (aggregate) out += ')';
    if (!core.from.empty()) {
        out += " FROM ";
        for (size_t i = 0; i < core.from.size(); ++i) {
            if (i) out += ", ";
            const TableRef& ref = core.from[i];
            if (!ref.joined) {
                out += ref.table;
                continue;
            }
            out += ref.left;
            out += ' ';
            out += join_kind_text(ref.kind);
            out += ' ';
            out += ref.right;
            if (ref.on) {
                out += " ON ";
                print_expr(*ref.on, 0, out);
            }
        }
    }
    if (core.where) {
        out += " WHERE ";
        print_expr(*core.where, 0, out);
    }
    if (core.group_by) {
        out += " GROUP BY ";
        out += *core.group_by;
    }
    if (core.having) {
        out += " HAVING ";
        print_expr(*core.having, 0, out);
    }
}

// Set-operation chains print left-associatively: the left child is flat
// when it is itself a set operation, the right child always parenthesized
// if it is one. A child carrying its own ORDER BY needs parentheses too.
void print_set_operand(const Query& q, bool right_side, std::string& out) {
    bool needs_parens = q.order_by.has_value() || (q.is_set() && right_side);
    if (needs_parens) {
        out += '(';
        print_query(q, out);
        out += ')';
    } else if (q.is_set()) {
        print_query(q, out);
    } else {
        print_core(*q.core, out);
    }
}

void print_query(const Query& q, std::string& out) {
    if (q.is_set()) {
        print_set_operand(*q.set->left, false, out);
        out += ' ';
        out += set_op_text(q.set->op);
        out += ' ';
        print_set_operand(*q.set->right, true, out);
    } else {
        print_core(*q.core, out);
    }
    if (q.order_by) {
        out += " ORDER BY ";
        out += q.order_by->column;
        out += q.order_by->desc ? " DESC" : " ASC";
    }
}

void collect_expr_keywords(const Expr& e, std::set<std::string>& out);

void collect_query_keywords(const Query& q, std::set<std::string>& out);

void collect_expr_keywords(const Expr& e, std::set<std::string>& out) {
    switch (e.kind) {
        case ExprKind::Literal:
        case ExprKind::Column: break;
        case ExprKind::And: out.insert("AND"); break;
        case ExprKind::Or: out.insert("OR"); break;
        case ExprKind::Xor: out.insert("XOR"); break;
        case ExprKind::Not: out.insert("NOT"); break;
        case ExprKind::IsTest: {
            std::string kw = "IS ";
            if (e.negated) kw += "NOT ";
            switch (e.is_op) {
                case IsOp::True: kw += "TRUE"; break;
                case IsOp::False: kw += "FALSE"; break;
                case IsOp::Unknown: kw += "UNKNOWN"; break;
                case IsOp::Null: kw += "NULL"; break;
            }
            out.insert(kw);
            break;
        }
        case ExprKind::Compare: out.insert(compare_op_text(e.cmp)); break;
        case ExprKind::Between: out.insert(e.negated ? "NOT BETWEEN" : "BETWEEN"); break;
        case ExprKind::InList: out.insert(e.negated ? "NOT IN" : "IN"); break;
        case ExprKind::Exists: out.insert("EXISTS"); break;
        case ExprKind::Arith:
            switch (e.arith) {
                case ArithOp::Add: out.insert("+"); break;
                case ArithOp::Sub: out.insert("-"); break;
                case ArithOp::Mul: out.insert("*"); break;
                case ArithOp::Div: out.insert("/"); break;
            }
            break;
        case ExprKind::Mod: out.insert("MOD"); break;
        case ExprKind::Power: out.insert("POWER"); break;
        case ExprKind::Length:
            switch (e.length_spelling) {
                case LengthSpelling::Length: out.insert("LENGTH"); break;
                case LengthSpelling::CharLength: out.insert("CHAR_LENGTH"); break;
                case LengthSpelling::CharacterLength: out.insert("CHARACTER_LENGTH"); break;
            }
            break;
        case ExprKind::Abs: out.insert("ABS"); break;
        case ExprKind::Ln: out.insert("LN"); break;
        case ExprKind::ExpFn: out.insert("EXP"); break;
        case ExprKind::Sqrt: out.insert("SQRT"); break;
        case ExprKind::Floor: out.insert("FLOOR"); break;
        case ExprKind::Ceil:
            out.insert(e.ceil_spelling == CeilSpelling::Ceil ? "CEIL" : "CEILING");
            break;
        case ExprKind::Concat: out.insert("||"); break;
        case ExprKind::Substring: out.insert("SUBSTRING"); break;
        case ExprKind::Trim: out.insert(e.trim_left ? "LTRIM" : "RTRIM"); break;
        case ExprKind::Fold: out.insert(e.fold_upper ? "UPPER" : "LOWER"); break;
        case ExprKind::Case: out.insert("CASE"); break;
        case ExprKind::Cast: out.insert("CAST"); break;
        case ExprKind::Subquery: break;
    }
    for (const ExprPtr& kid : e.kids) collect_expr_keywords(*kid, out);
    if (e.sub) collect_query_keywords(*e.sub, out);
}

void collect_query_keywords(const Query& q, std::set<std::string>& out) {
    if (q.is_set()) {
        out.insert(set_op_text(q.set->op));
        collect_query_keywords(*q.set->left, out);
        collect_query_keywords(*q.set->right, out);
    } else {
        const SelectCore& core = *q.core;
        out.insert("SELECT");
        if (core.modifier != SelectModifier::None) out.insert(modifier_text(core.modifier));
        for (const ExprPtr& item : core.items) collect_expr_keywords(*item, out);
        if (!core.from.empty()) out.insert("FROM");
        for (const TableRef& ref : core.from) {
            if (!ref.joined) continue;
            out.insert(join_kind_text(ref.kind));
            if (ref.on) {
                out.insert("ON");
                collect_expr_keywords(*ref.on, out);
            }
        }
        if (core.where) {
            out.insert("WHERE");
            collect_expr_keywords(*core.where, out);
        }
        if (core.group_by) out.insert("GROUP BY");
        if (core.having) {
            out.insert("HAVING");
            collect_expr_keywords(*core.having, out);
        }
    }
    if (q.order_by) out.insert("ORDER BY");
}

}  // namespace

std::string print(const Query& q) {
    std::string out;
    print_query(q, out);
    return out;
}

std::string print(const Expr& e) {
    std::string out;
    print_expr(e, 0, out);
    return out;
}

std::set<std::string> keywords_of(const Query& q) {
    std::set<std::string> out;
    collect_query_keywords(q, out);
    return out;
}

}  // namespace sqlsem
