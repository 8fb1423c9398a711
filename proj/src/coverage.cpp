#include "sqlsem/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "sqlsem/printer.hpp"

namespace sqlsem {

namespace {

const char* kClsLit = "lit";
const char* kClsCol = "col";
const char* kClsExp = "exp";

const char* cls_of(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal: return kClsLit;
        case ExprKind::Column: return kClsCol;
        default: return kClsExp;
    }
}

const std::vector<const char*>& cls_names() {
    static const std::vector<const char*> names = {kClsLit, kClsCol, kClsExp};
    return names;
}

// Keywords whose rules are indexed by a single operand class.
const std::vector<std::string>& unary_class_keywords() {
    static const std::vector<std::string> kws = {
        "NOT", "IS TRUE", "IS FALSE", "IS UNKNOWN", "IS NOT TRUE", "IS NOT FALSE",
        "IS NOT UNKNOWN", "IS NULL", "IS NOT NULL", "BETWEEN", "NOT BETWEEN", "LENGTH",
        "CHAR_LENGTH", "CHARACTER_LENGTH", "ABS", "LN", "EXP", "SQRT", "FLOOR", "CEIL",
        "CEILING", "LTRIM", "RTRIM", "UPPER", "LOWER", "CASE",
    };
    return kws;
}

// Keywords whose rules are indexed by both operand classes.
const std::vector<std::string>& binary_class_keywords() {
    static const std::vector<std::string> kws = {
        "AND", "OR",  "XOR", "=",   "!=",    "<",  ">",         "<=", ">=",
        "+",   "-",   "*",   "/",   "MOD",   "POWER", "||", "SUBSTRING",
    };
    return kws;
}

std::string is_test_keyword(const Expr& e) {
    std::string kw = "IS ";
    if (e.negated) kw += "NOT ";
    switch (e.is_op) {
        case IsOp::True: kw += "TRUE"; break;
        case IsOp::False: kw += "FALSE"; break;
        case IsOp::Unknown: kw += "UNKNOWN"; break;
        case IsOp::Null: kw += "NULL"; break;
    }
    return kw;
}

std::string length_keyword(const Expr& e) {
    switch (e.length_spelling) {
        case LengthSpelling::Length: return "LENGTH";
        case LengthSpelling::CharLength: return "CHAR_LENGTH";
        case LengthSpelling::CharacterLength: return "CHARACTER_LENGTH";
    }
    return "LENGTH";
}

const char* cast_type_name(CastType t) {
    switch (t) {
        case CastType::String: return "string";
        case CastType::Numeric: return "numeric";
        case CastType::Boolean: return "boolean";
    }
    return "string";
}

const char* modifier_keyword(SelectModifier m) {
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

std::string select_rule_impl(const SelectCore& core) {
    if (core.star) return "SELECT/star";
    if (core.items.size() == 1 && core.items[0]->kind == ExprKind::Literal &&
        core.items[0]->lit.is_null()) {
        return "SELECT/null";
    }
    for (const ExprPtr& item : core.items) {
        if (!expr_is_constant(*item)) return "SELECT/columns";
    }
    return "SELECT/constant";
}

std::string from_rule(const SelectCore& core) {
    if (core.from.size() > 1) return "FROM/list";
    if (core.from.size() == 1 && core.from[0].joined) return "FROM/join";
    return "FROM/single";
}

std::string modifier_rule_impl(const SelectCore& core) {
    SelectModifier m = core.modifier;
    if (m == SelectModifier::None) return "";
    if (m == SelectModifier::Distinct) return "DISTINCT/table";
    if (m == SelectModifier::All) return "ALL/table";
    if (m == SelectModifier::Count) {
        return core.star ? "COUNT/star" : "COUNT/column";
    }
    return std::string(modifier_keyword(m)) + "/column";
}

// The keyword id of an expression's top node; lit/col/subq for non-keyword
// tops. Used by the composite signature's condition slots.
std::string top_token(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal: return "lit";
        case ExprKind::Column: return "col";
        case ExprKind::Subquery: return "subq";
        case ExprKind::And: return "AND";
        case ExprKind::Or: return "OR";
        case ExprKind::Xor: return "XOR";
        case ExprKind::Not: return "NOT";
        case ExprKind::IsTest: return is_test_keyword(e);
        case ExprKind::Compare: return compare_op_text(e.cmp);
        case ExprKind::Between: return e.negated ? "NOT BETWEEN" : "BETWEEN";
        case ExprKind::InList: return e.negated ? "NOT IN" : "IN";
        case ExprKind::Exists: return "EXISTS";
        case ExprKind::Arith:
            switch (e.arith) {
                case ArithOp::Add: return "+";
                case ArithOp::Sub: return "-";
                case ArithOp::Mul: return "*";
                case ArithOp::Div: return "/";
            }
            return "+";
        case ExprKind::Mod: return "MOD";
        case ExprKind::Power: return "POWER";
        case ExprKind::Length: return length_keyword(e);
        case ExprKind::Abs: return "ABS";
        case ExprKind::Ln: return "LN";
        case ExprKind::ExpFn: return "EXP";
        case ExprKind::Sqrt: return "SQRT";
        case ExprKind::Floor: return "FLOOR";
        case ExprKind::Ceil: return e.ceil_spelling == CeilSpelling::Ceil ? "CEIL" : "CEILING";
        case ExprKind::Concat: return "||";
        case ExprKind::Substring: return "SUBSTRING";
        case ExprKind::Trim: return e.trim_left ? "LTRIM" : "RTRIM";
        case ExprKind::Fold: return e.fold_upper ? "UPPER" : "LOWER";
        case ExprKind::Case: return "CASE";
        case ExprKind::Cast: return "CAST";
    }
    return "lit";
}

void collect_expr_rules(const Expr& e, std::vector<std::string>& out) {
    if (auto rule = rule_for_expr(e)) out.push_back(*rule);
    for (const ExprPtr& kid : e.kids) collect_expr_rules(*kid, out);
}

void collect_query_rules(const Query& q, std::vector<std::string>& out);

void collect_subquery_rules(const Expr& e, std::vector<std::string>& out) {
    if (e.sub) collect_query_rules(*e.sub, out);
    for (const ExprPtr& kid : e.kids) collect_subquery_rules(*kid, out);
}

void collect_query_rules(const Query& q, std::vector<std::string>& out) {
    if (q.is_set()) {
        out.push_back(std::string(set_op_text(q.set->op)) + "/pair");
        collect_query_rules(*q.set->left, out);
        collect_query_rules(*q.set->right, out);
    } else {
        const SelectCore& core = *q.core;
        out.push_back(select_rule_of(core));
        std::string mod = modifier_rule_of(core);
        if (!mod.empty()) out.push_back(mod);
        if (!core.from.empty()) out.push_back(from_rule(core));
        for (const TableRef& ref : core.from) {
            if (!ref.joined) continue;
            out.push_back(std::string(join_kind_text(ref.kind)) + "/pair");
            if (ref.on) {
                out.push_back("ON/cond");
                collect_expr_rules(*ref.on, out);
                collect_subquery_rules(*ref.on, out);
            }
        }
        for (const ExprPtr& item : core.items) {
            collect_expr_rules(*item, out);
            collect_subquery_rules(*item, out);
        }
        if (core.where) {
            out.push_back("WHERE/cond");
            collect_expr_rules(*core.where, out);
            collect_subquery_rules(*core.where, out);
        }
        if (core.group_by) out.push_back("GROUP BY/column");
        if (core.having) {
            out.push_back("HAVING/cond");
            collect_expr_rules(*core.having, out);
            collect_subquery_rules(*core.having, out);
        }
    }
    if (q.order_by) out.push_back(q.order_by->desc ? "ORDER BY/desc" : "ORDER BY/asc");
}

void signature_query(const Query& q, int level, std::vector<std::string>& out);

void signature_cond(const char* clause, const Expr& e, int level, std::vector<std::string>& out) {
    out.push_back(std::string(clause) + "/cond");
    out.push_back("op:" + top_token(e));
    if (level < kCompositeQueryLevels) {
        if (e.kind == ExprKind::Exists) signature_query(*e.sub, level + 1, out);
        if (e.kind == ExprKind::Subquery) signature_query(*e.sub, level + 1, out);
    }
}

void signature_query(const Query& q, int level, std::vector<std::string>& out) {
    if (q.is_set()) {
        out.push_back(std::string(set_op_text(q.set->op)) + "/pair");
        signature_query(*q.set->left, level + 1, out);
        signature_query(*q.set->right, level + 1, out);
    } else {
        const SelectCore& core = *q.core;
        out.push_back(select_rule_of(core));
        std::string mod = modifier_rule_of(core);
        if (!mod.empty()) out.push_back(mod);
        if (!core.from.empty()) {
            out.push_back(from_rule(core));
            if (core.from.size() == 1 && core.from[0].joined) {
                const TableRef& ref = core.from[0];
                out.push_back(std::string(join_kind_text(ref.kind)) + "/pair");
                if (ref.on) signature_cond("ON", *ref.on, level, out);
            }
        }
        if (core.where) signature_cond("WHERE", *core.where, level, out);
        if (core.group_by) out.push_back("GROUP BY/column");
        if (core.having) signature_cond("HAVING", *core.having, level, out);
    }
    if (q.order_by) out.push_back(q.order_by->desc ? "ORDER BY/desc" : "ORDER BY/asc");
}

}  // namespace

const std::vector<std::string>& keyword_universe() {
    static const std::vector<std::string> kws = [] {
        std::vector<std::string> v = {
            "SELECT", "FROM", "WHERE", "GROUP BY", "HAVING", "ORDER BY", "ON", "DISTINCT",
            "ALL", "MAX", "MIN", "SUM", "COUNT", "AVG",
            "UNION", "UNION ALL", "INTERSECT", "INTERSECT ALL", "EXCEPT", "EXCEPT ALL",
            "CROSS JOIN", "NATURAL JOIN", "INNER JOIN", "LEFT JOIN", "RIGHT JOIN", "FULL JOIN",
            "AND", "OR", "XOR", "NOT",
            "IS TRUE", "IS FALSE", "IS UNKNOWN", "IS NOT TRUE", "IS NOT FALSE", "IS NOT UNKNOWN",
            "IS NULL", "IS NOT NULL",
            "=", "!=", "<", ">", "<=", ">=",
            "BETWEEN", "NOT BETWEEN", "IN", "NOT IN", "EXISTS",
            "+", "-", "*", "/",
            "MOD", "POWER", "LENGTH", "CHAR_LENGTH", "CHARACTER_LENGTH", "ABS", "LN", "EXP",
            "SQRT", "FLOOR", "CEIL", "CEILING", "||", "SUBSTRING", "LTRIM", "RTRIM", "UPPER",
            "LOWER", "CASE", "CAST",
        };
        return v;
    }();
    return kws;
}

const std::vector<std::string>& rule_universe() {
    static const std::vector<std::string> rules = [] {
        std::vector<std::string> v;
        v.push_back("SELECT/star");
        v.push_back("SELECT/columns");
        v.push_back("SELECT/constant");
        v.push_back("SELECT/null");
        v.push_back("FROM/single");
        v.push_back("FROM/list");
        v.push_back("FROM/join");
        v.push_back("WHERE/cond");
        v.push_back("ON/cond");
        v.push_back("HAVING/cond");
        v.push_back("GROUP BY/column");
        v.push_back("ORDER BY/asc");
        v.push_back("ORDER BY/desc");
        v.push_back("DISTINCT/table");
        v.push_back("ALL/table");
        for (const char* agg : {"MAX", "MIN", "SUM", "AVG"}) {
            v.push_back(std::string(agg) + "/column");
        }
        v.push_back("COUNT/column");
        v.push_back("COUNT/star");
        for (SetOpKind op : {SetOpKind::Union, SetOpKind::UnionAll, SetOpKind::Intersect,
                             SetOpKind::IntersectAll, SetOpKind::Except, SetOpKind::ExceptAll}) {
            v.push_back(std::string(set_op_text(op)) + "/pair");
        }
        for (JoinKind kind : {JoinKind::Cross, JoinKind::Natural, JoinKind::Inner, JoinKind::Left,
                              JoinKind::Right, JoinKind::Full}) {
            v.push_back(std::string(join_kind_text(kind)) + "/pair");
        }
        for (const std::string& kw : binary_class_keywords()) {
            for (const char* a : cls_names()) {
                for (const char* b : cls_names()) {
                    v.push_back(kw + "/" + a + "," + b);
                }
            }
        }
        for (const std::string& kw : unary_class_keywords()) {
            for (const char* a : cls_names()) v.push_back(kw + "/" + a);
        }
        for (const char* kw : {"IN", "NOT IN"}) {
            for (const char* a : cls_names()) {
                v.push_back(std::string(kw) + "/" + a + ",1");
                v.push_back(std::string(kw) + "/" + a + ",n");
            }
        }
        v.push_back("EXISTS/subquery");
        for (const char* a : cls_names()) {
            for (const char* t : {"string", "numeric", "boolean"}) {
                v.push_back(std::string("CAST/") + a + "," + t);
            }
        }
        return v;
    }();
    return rules;
}

size_t total_keywords() { return keyword_universe().size(); }
size_t total_rules() { return rule_universe().size(); }

std::optional<std::string> rule_for_expr(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal:
        case ExprKind::Column:
        case ExprKind::Subquery: return std::nullopt;
        case ExprKind::Exists: return "EXISTS/subquery";
        case ExprKind::InList: {
            std::string kw = e.negated ? "NOT IN" : "IN";
            return kw + "/" + cls_of(*e.kids[0]) + "," + (e.kids.size() == 2 ? "1" : "n");
        }
        case ExprKind::Cast:
            return std::string("CAST/") + cls_of(*e.kids[0]) + "," + cast_type_name(e.cast_type);
        case ExprKind::Between:
        case ExprKind::Not:
        case ExprKind::IsTest:
        case ExprKind::Length:
        case ExprKind::Abs:
        case ExprKind::Ln:
        case ExprKind::ExpFn:
        case ExprKind::Sqrt:
        case ExprKind::Floor:
        case ExprKind::Ceil:
        case ExprKind::Trim:
        case ExprKind::Fold:
        case ExprKind::Case: return top_token(e) + "/" + cls_of(*e.kids[0]);
        default:
            // binary operators: both operand classes
            return top_token(e) + "/" + cls_of(*e.kids[0]) + "," + cls_of(*e.kids[1]);
    }
}

std::vector<std::string> rules_of(const Query& q) {
    std::vector<std::string> out;
    collect_query_rules(q, out);
    return out;
}

std::string composite_signature(const Query& q) {
    std::vector<std::string> parts;
    signature_query(q, 1, parts);
    std::string sig;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) sig += '>';
        sig += parts[i];
    }
    return sig;
}

GrammarNodePtr grammar_leaf(std::string label) {
    auto n = std::make_shared<GrammarNode>();
    n->terminal = true;
    n->label = std::move(label);
    return n;
}

GrammarNodePtr grammar_keyword(std::string label, uint64_t rule_count,
                               std::vector<GrammarNodePtr> children) {
    auto n = std::make_shared<GrammarNode>();
    n->is_keyword = true;
    n->rule_count = rule_count;
    n->label = std::move(label);
    n->children = std::move(children);
    return n;
}

GrammarNodePtr grammar_group(std::string label, std::vector<GrammarNodePtr> children) {
    auto n = std::make_shared<GrammarNode>();
    n->label = std::move(label);
    n->children = std::move(children);
    return n;
}

std::string composite_count_text(CompositeCount n) {
    if (n == 0) return "0";
    std::string out;
    while (n > 0) {
        out += static_cast<char>('0' + static_cast<int>(n % 10));
        n /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

void traverse_grammar(const GrammarNode& node, std::vector<uint64_t>& path, CompositeCount& total,
                      std::unordered_set<const GrammarNode*>& on_path) {
    if (!on_path.insert(&node).second) {
        throw EngineError(ErrorKind::Grammar, "grammar model recursion without a cap");
    }
    if (!node.terminal) {
        if (node.is_keyword) path.push_back(node.rule_count);
        for (const GrammarNodePtr& child : node.children) {
            traverse_grammar(*child, path, total, on_path);
        }
        if (node.is_keyword) path.pop_back();
    } else {
        CompositeCount product = 1;
        for (uint64_t rules : path) product *= rules;
        total += product;
    }
    on_path.erase(&node);
}

}  // namespace

CompositeCount count_composite_rules(const GrammarNode& root) {
    CompositeCount total = 0;
    std::vector<uint64_t> path;
    std::unordered_set<const GrammarNode*> on_path;
    traverse_grammar(root, path, total, on_path);
    return total;
}

namespace {

// Arithmetic mirror of the signature derivation: the number of distinct
// signatures the model of this build admits. Alternatives here must match
// signature_query / signature_cond exactly.
CompositeCount model_query_count(int level);

CompositeCount model_cond_count(int level) {
    // lit + col + each operator keyword as a top token
    CompositeCount atomic = 2;
    atomic += 4;   // AND OR XOR NOT
    atomic += 8;   // IS family
    atomic += 6;   // comparisons
    atomic += 4;   // BETWEEN, NOT BETWEEN, IN, NOT IN
    atomic += 4;   // + - * /
    atomic += 2;   // MOD POWER
    atomic += 3;   // LENGTH family
    atomic += 7;   // ABS LN EXP SQRT FLOOR CEIL CEILING
    atomic += 2;   // || SUBSTRING
    atomic += 4;   // LTRIM RTRIM UPPER LOWER
    atomic += 2;   // CASE CAST
    if (level < kCompositeQueryLevels) {
        // EXISTS and condition-position subqueries expand one level down
        return atomic + 2 * model_query_count(level + 1);
    }
    return atomic + 2;  // EXISTS and subq stay atomic at the cap
}

CompositeCount model_query_count(int level) {
    CompositeCount cond = model_cond_count(level);
    CompositeCount select_rules = 4;
    CompositeCount modifier = 1 + 1 + 1 + 4 + 2;  // none, DISTINCT, ALL, 4 aggregates, COUNT x2
    CompositeCount from = 1 + 1 + 1 + (2 + 4 * cond);  // absent, single, list, join kinds
    CompositeCount where = 1 + cond;
    CompositeCount group = 1 + (1 + cond);  // absent, or GROUP BY with optional HAVING
    CompositeCount core = select_rules * modifier * from * where * group;
    CompositeCount body = core;
    if (level < kCompositeQueryLevels) {
        CompositeCount child = model_query_count(level + 1);
        body += 6 * child * child;
    }
    return body * 3;  // ORDER BY absent / asc / desc
}

}  // namespace

CompositeCount sql_composite_total() {
    static const CompositeCount total = model_query_count(1);
    return total;
}

std::string select_rule_of(const SelectCore& core) { return select_rule_impl(core); }
std::string modifier_rule_of(const SelectCore& core) { return modifier_rule_impl(core); }

bool RecordOutcome::grew(const std::string& criterion) const {
    if (criterion == "keyword") return keyword_grew;
    if (criterion == "rule") return rule_grew;
    return composite_grew;
}

RecordOutcome CoverageLedger::record(const Query& q) {
    RecordOutcome outcome;
    std::set<std::string> kws = keywords_of(q);
    for (const std::string& kw : kws) {
        if (keywords_.insert(kw).second) outcome.keyword_grew = true;
        keyword_counts_[kw]++;
    }
    for (const std::string& rule : rules_of(q)) {
        if (rules_.insert(rule).second) outcome.rule_grew = true;
    }
    if (composites_.insert(composite_signature(q)).second) outcome.composite_grew = true;
    return outcome;
}

RecordOutcome CoverageLedger::peek(const Query& q) const {
    RecordOutcome outcome;
    for (const std::string& kw : keywords_of(q)) {
        if (!keywords_.count(kw)) outcome.keyword_grew = true;
    }
    for (const std::string& rule : rules_of(q)) {
        if (!rules_.count(rule)) outcome.rule_grew = true;
    }
    if (!composites_.count(composite_signature(q))) outcome.composite_grew = true;
    return outcome;
}

double CoverageLedger::keyword_ratio() const {
    return total_keywords() == 0 ? 0.0
                                 : static_cast<double>(keywords_.size()) /
                                       static_cast<double>(total_keywords());
}

double CoverageLedger::rule_ratio() const {
    return total_rules() == 0
               ? 0.0
               : static_cast<double>(rules_.size()) / static_cast<double>(total_rules());
}

double CoverageLedger::composite_ratio() const {
    long double total = static_cast<long double>(sql_composite_total());
    if (total <= 0) return 0.0;
    return static_cast<double>(static_cast<long double>(composites_.size()) / total);
}

std::string CoverageLedger::report() const {
    char line[192];
    std::string out;
    out += "criterion  covered  total  ratio\n";
    std::snprintf(line, sizeof(line), "keyword    %zu  %zu  %.6f\n", covered_keywords(),
                  total_keywords(), keyword_ratio());
    out += line;
    std::snprintf(line, sizeof(line), "rule       %zu  %zu  %.6f\n", covered_rules(), total_rules(),
                  rule_ratio());
    out += line;
    out += "composite  " + std::to_string(covered_composites()) + "  " +
           composite_count_text(sql_composite_total());
    std::snprintf(line, sizeof(line), "  %.6f\n", composite_ratio());
    out += line;
    out += "keywords:";
    for (const auto& [kw, count] : keyword_counts_) {
        out += " " + kw + "=" + std::to_string(count);
    }
    out += "\n";
    std::snprintf(line, sizeof(line), "COV keyword %zu %zu %.6f\n", covered_keywords(),
                  total_keywords(), keyword_ratio());
    out += line;
    std::snprintf(line, sizeof(line), "COV rule %zu %zu %.6f\n", covered_rules(), total_rules(),
                  rule_ratio());
    out += line;
    out += "COV composite " + std::to_string(covered_composites()) + " " +
           composite_count_text(sql_composite_total());
    std::snprintf(line, sizeof(line), " %.6f\n", composite_ratio());
    out += line;
    return out;
}

}  // namespace sqlsem
