#include "sqlsem/generator.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "sqlsem/exec.hpp"
#include "sqlsem/parser.hpp"
#include "sqlsem/printer.hpp"

namespace sqlsem {

namespace {

enum class ColKind { Num, Str, Bool, Any };

struct ColumnInfo {
    std::string ref;  // ready-to-use reference text
    ColKind kind;
};

struct GenScope {
    std::vector<ColumnInfo> columns;

    std::vector<ColumnInfo> of_kind(ColKind want) const {
        std::vector<ColumnInfo> out;
        for (const ColumnInfo& c : columns) {
            if (c.kind == want || c.kind == ColKind::Any) out.push_back(c);
        }
        return out;
    }
};

struct Gen {
    const Catalog& catalog;
    Rng& rng;
    GenProfile profile;

    bool core() const { return profile == GenProfile::Core; }

    ColKind column_kind(const BagTable& t, size_t idx) const {
        bool saw_num = false, saw_str = false, saw_bool = false;
        for (const Row& r : t.rows) {
            switch (r[idx].kind()) {
                case ValueKind::Int:
                case ValueKind::Float: saw_num = true; break;
                case ValueKind::Str: saw_str = true; break;
                case ValueKind::Bool: saw_bool = true; break;
                default: break;
            }
        }
        if (saw_num && !saw_str && !saw_bool) return ColKind::Num;
        if (saw_str && !saw_num && !saw_bool) return ColKind::Str;
        if (saw_bool && !saw_num && !saw_str) return ColKind::Bool;
        return ColKind::Any;
    }

    void add_table_columns(GenScope& scope, const std::string& table, bool qualified) const {
        const BagTable& t = catalog.table(table);
        for (size_t i = 0; i < t.attributes.size(); ++i) {
            std::string ref = qualified ? table + "." + t.attributes[i] : t.attributes[i];
            scope.columns.push_back({ref, column_kind(t, i)});
        }
    }

    std::string random_table() {
        std::vector<std::string> names;
        for (const auto& [name, t] : catalog.tables) names.push_back(name);
        return rng.pick(names);
    }

    // ---- literal pools; chosen to exercise the cast rules ----

    Value random_int_value() { return Value::integer(rng.int_range(-5, 10)); }

    Value random_float_value() {
        return Value::real(static_cast<double>(rng.int_range(-300, 500)) / 100.0);
    }

    Value random_str_value() {
        static const std::vector<std::string> pool = {
            "", "a", "abc", "hello", "0", "false", "hhhh", "-12", "1gbnn", "2.5x", " pad ", "AbC",
        };
        return Value::text(pool[rng.below(pool.size())]);
    }

    Value random_literal_value() {
        switch (rng.below(7)) {
            case 0: return Value::null();
            case 1: return Value::boolean(rng.chance(0.5));
            case 2:
            case 3: return random_int_value();
            case 4: return random_float_value();
            default: return random_str_value();
        }
    }

    // ---- expressions ----

    ExprPtr column_or(const GenScope& scope, ColKind want, const std::function<Value()>& fallback) {
        std::vector<ColumnInfo> candidates = scope.of_kind(want);
        if (!candidates.empty() && rng.chance(0.72)) {
            return col(candidates[rng.below(candidates.size())].ref);
        }
        return lit(fallback());
    }

    ExprPtr num_leaf(const GenScope& scope) {
        return column_or(scope, ColKind::Num, [&] {
            if (!core() && rng.chance(0.08)) return Value::null();
            return rng.chance(0.25) ? random_float_value() : random_int_value();
        });
    }

    ExprPtr str_leaf(const GenScope& scope) {
        return column_or(scope, ColKind::Str, [&] {
            if (!core() && rng.chance(0.08)) return Value::null();
            return random_str_value();
        });
    }

    ExprPtr num_expr(const GenScope& scope, int level, int depth) {
        if (depth <= 0 || rng.chance(0.35)) return num_leaf(scope);
        if (core()) {
            switch (rng.below(4)) {
                case 0:
                    return arith(static_cast<ArithOp>(rng.below(3)), num_expr(scope, level, depth - 1),
                                 num_expr(scope, level, depth - 1));
                case 1: return unary_fn(ExprKind::Abs, num_expr(scope, level, depth - 1));
                case 2: return unary_fn(ExprKind::Length, str_leaf(scope));
                default: return num_leaf(scope);
            }
        }
        switch (rng.below(14)) {
            case 0:
                return arith(static_cast<ArithOp>(rng.below(4)), num_expr(scope, level, depth - 1),
                             num_expr(scope, level, depth - 1));
            case 1:
                return binary_fn(ExprKind::Mod, num_expr(scope, level, depth - 1),
                                 num_expr(scope, level, depth - 1));
            case 2:
                return binary_fn(ExprKind::Power, num_expr(scope, level, depth - 1),
                                 num_expr(scope, level, depth - 1));
            case 3: {
                ExprPtr e = unary_fn(ExprKind::Length, str_expr(scope, level, depth - 1));
                e->length_spelling = static_cast<LengthSpelling>(rng.below(3));
                return e;
            }
            case 4: return unary_fn(ExprKind::Abs, num_expr(scope, level, depth - 1));
            case 5: return unary_fn(ExprKind::Ln, num_expr(scope, level, depth - 1));
            case 6: return unary_fn(ExprKind::ExpFn, num_expr(scope, level, depth - 1));
            case 7: return unary_fn(ExprKind::Sqrt, num_expr(scope, level, depth - 1));
            case 8: return unary_fn(ExprKind::Floor, num_expr(scope, level, depth - 1));
            case 9: {
                ExprPtr e = unary_fn(ExprKind::Ceil, num_expr(scope, level, depth - 1));
                e->ceil_spelling = rng.chance(0.5) ? CeilSpelling::Ceil : CeilSpelling::Ceiling;
                return e;
            }
            case 10:
                return case_when(bool_expr(scope, level, depth - 1),
                                 num_expr(scope, level, depth - 1), num_expr(scope, level, depth - 1));
            case 11: return cast_as(any_expr(scope, level, depth - 1), CastType::Numeric);
            default: return num_leaf(scope);
        }
    }

    ExprPtr str_expr(const GenScope& scope, int level, int depth) {
        if (depth <= 0 || rng.chance(0.4)) return str_leaf(scope);
        if (core()) {
            switch (rng.below(4)) {
                case 0:
                    return binary_fn(ExprKind::Concat, str_leaf(scope), str_leaf(scope));
                case 1: {
                    ExprPtr e = unary_fn(ExprKind::Trim, str_leaf(scope));
                    e->trim_left = rng.chance(0.5);
                    return e;
                }
                case 2: {
                    ExprPtr e = unary_fn(ExprKind::Fold, str_leaf(scope));
                    e->fold_upper = rng.chance(0.5);
                    return e;
                }
                default: return str_leaf(scope);
            }
        }
        switch (rng.below(7)) {
            case 0:
                return binary_fn(ExprKind::Concat, str_expr(scope, level, depth - 1),
                                 str_expr(scope, level, depth - 1));
            case 1:
                return binary_fn(ExprKind::Substring, str_expr(scope, level, depth - 1),
                                 num_expr(scope, level, depth - 1));
            case 2: {
                ExprPtr e = unary_fn(ExprKind::Trim, str_expr(scope, level, depth - 1));
                e->trim_left = rng.chance(0.5);
                return e;
            }
            case 3: {
                ExprPtr e = unary_fn(ExprKind::Fold, str_expr(scope, level, depth - 1));
                e->fold_upper = rng.chance(0.5);
                return e;
            }
            case 4:
                return case_when(bool_expr(scope, level, depth - 1),
                                 str_expr(scope, level, depth - 1), str_expr(scope, level, depth - 1));
            case 5: return cast_as(any_expr(scope, level, depth - 1), CastType::String);
            default: return str_leaf(scope);
        }
    }

    ExprPtr any_expr(const GenScope& scope, int level, int depth) {
        switch (rng.below(3)) {
            case 0: return num_expr(scope, level, depth);
            case 1: return str_expr(scope, level, depth);
            default: return bool_expr(scope, level, depth);
        }
    }

    ExprPtr comparison(const GenScope& scope, int level, int depth) {
        CompareOp op = static_cast<CompareOp>(rng.below(6));
        ExprPtr lhs = num_expr(scope, level, depth);
        ExprPtr rhs;
        if (!core() && level < kCompositeQueryLevels && rng.chance(0.05)) {
            rhs = scalar_subquery(gen_query_at(level + 1, 1));
        } else {
            rhs = num_expr(scope, level, depth);
        }
        return compare(op, lhs, rhs);
    }

    ExprPtr bool_leaf(const GenScope& scope, int level) {
        switch (rng.below(10)) {
            case 0: {
                std::vector<ColumnInfo> bools = scope.of_kind(ColKind::Bool);
                if (!bools.empty()) return col(bools[rng.below(bools.size())].ref);
                return comparison(scope, level, 0);
            }
            case 1: {
                ExprPtr e = is_test(num_leaf(scope), random_is_op(), rng.chance(0.35));
                return e;
            }
            case 2: {
                bool negated = !core() && rng.chance(0.3);
                return between(num_leaf(scope), num_leaf(scope), num_leaf(scope), negated);
            }
            case 3: {
                size_t n = 1 + rng.below(3);
                std::vector<ExprPtr> elems;
                for (size_t i = 0; i < n; ++i) elems.push_back(num_leaf(scope));
                return in_list(num_leaf(scope), std::move(elems), rng.chance(0.3));
            }
            case 4:
                if (!core()) return lit(rng.chance(0.5) ? Value::boolean(rng.chance(0.5)) : Value::null());
                return comparison(scope, level, 0);
            case 5:
                if (level < kCompositeQueryLevels && rng.chance(core() ? 0.35 : 0.5)) {
                    return exists(gen_query_at(level + 1, 0));
                }
                return comparison(scope, level, 0);
            default: return comparison(scope, level, rng.below(2) ? 1 : 0);
        }
    }

    IsOp random_is_op() {
        if (core()) {
            // IS [NOT] UNKNOWN is not portable; the rest are
            return rng.chance(0.5) ? (rng.chance(0.5) ? IsOp::True : IsOp::False) : IsOp::Null;
        }
        return static_cast<IsOp>(rng.below(4));
    }

    ExprPtr bool_expr(const GenScope& scope, int level, int depth) {
        if (depth <= 0 || rng.chance(0.3)) return bool_leaf(scope, level);
        switch (rng.below(6)) {
            case 0:
                return logic(ExprKind::And, bool_expr(scope, level, depth - 1),
                             bool_expr(scope, level, depth - 1));
            case 1:
                return logic(ExprKind::Or, bool_expr(scope, level, depth - 1),
                             bool_expr(scope, level, depth - 1));
            case 2:
                if (!core()) {
                    return logic(ExprKind::Xor, bool_expr(scope, level, depth - 1),
                                 bool_expr(scope, level, depth - 1));
                }
                return not_of(bool_expr(scope, level, depth - 1));
            case 3: return not_of(bool_expr(scope, level, depth - 1));
            case 4:
                return is_test(bool_expr(scope, level, depth - 1), random_is_op(), rng.chance(0.3));
            default:
                if (!core() && rng.chance(0.3)) {
                    return cast_as(any_expr(scope, level, depth - 1), CastType::Boolean);
                }
                return comparison(scope, level, depth - 1);
        }
    }

    // ---- query structure ----

    // Subqueries and set operations appear only at the root level so the
    // composite model and the signatures stay aligned.
    QueryPtr gen_query_at(int level, int min_items) {
        if (level < kCompositeQueryLevels && rng.chance(core() ? 0.08 : 0.12)) {
            size_t items = 1 + rng.below(2);
            QueryPtr left = gen_core_at(level + 1, items);
            QueryPtr right = gen_core_at(level + 1, items);
            SetOpKind op;
            if (core()) {
                static const std::vector<SetOpKind> portable = {
                    SetOpKind::Union, SetOpKind::UnionAll, SetOpKind::Intersect, SetOpKind::Except};
                op = portable[rng.below(portable.size())];
            } else {
                op = static_cast<SetOpKind>(rng.below(6));
            }
            QueryPtr q = make_set(op, left, right);
            maybe_order_by(*q);
            return q;
        }
        return gen_core_at(level, min_items);
    }

    QueryPtr gen_core_at(int level, int forced_items) {
        auto core_ptr = std::make_shared<SelectCore>();
        GenScope scope;

        // FROM
        bool dual = forced_items == 0 && !this->core() && rng.chance(0.03);
        if (!dual) {
            double joined_p = this->core() ? 0.10 : 0.24;
            double list_p = 0.12;
            double roll = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
            if (roll < joined_p && catalog.tables.size() >= 2) {
                TableRef ref;
                ref.joined = true;
                ref.left = random_table();
                do {
                    ref.right = random_table();
                } while (ref.right == ref.left);
                if (this->core()) {
                    ref.kind = rng.chance(0.6) ? JoinKind::Cross : JoinKind::Inner;
                } else {
                    ref.kind = static_cast<JoinKind>(rng.below(6));
                }
                add_table_columns(scope, ref.left, true);
                add_table_columns(scope, ref.right, true);
                if (ref.kind == JoinKind::Inner || ref.kind == JoinKind::Left ||
                    ref.kind == JoinKind::Right || ref.kind == JoinKind::Full) {
                    ref.on = bool_expr(scope, level, 1);
                }
                core_ptr->from.push_back(std::move(ref));
            } else if (roll < joined_p + list_p && catalog.tables.size() >= 2) {
                std::string a = random_table(), b;
                do {
                    b = random_table();
                } while (b == a);
                core_ptr->from.push_back(TableRef{false, a, JoinKind::Cross, "", "", nullptr});
                core_ptr->from.push_back(TableRef{false, b, JoinKind::Cross, "", "", nullptr});
                add_table_columns(scope, a, true);
                add_table_columns(scope, b, true);
            } else {
                std::string t = random_table();
                core_ptr->from.push_back(TableRef{false, t, JoinKind::Cross, "", "", nullptr});
                add_table_columns(scope, t, rng.chance(0.5));
            }
        }

        // WHERE
        if (!core_ptr->from.empty() && rng.chance(0.55)) {
            core_ptr->where = bool_expr(scope, level, 1 + rng.below(2));
        }

        // GROUP BY / modifier
        bool grouped = false;
        if (forced_items < 0 && !core_ptr->from.empty() && !scope.columns.empty() &&
            rng.chance(0.18)) {
            grouped = true;
            core_ptr->group_by = scope.columns[rng.below(scope.columns.size())].ref;
            if (rng.chance(0.4)) {
                GenScope key_scope;
                key_scope.columns.push_back({*core_ptr->group_by, ColKind::Any});
                core_ptr->having = bool_expr(key_scope, level, 1);
            }
        }
        bool aggregate = false;
        if (forced_items < 0 && !core_ptr->from.empty() && !scope.columns.empty() &&
            (grouped ? rng.chance(0.65) : rng.chance(0.14))) {
            aggregate = true;
            static const std::vector<SelectModifier> aggs = {
                SelectModifier::Max, SelectModifier::Min, SelectModifier::Sum,
                SelectModifier::Count, SelectModifier::Avg};
            core_ptr->modifier = aggs[rng.below(aggs.size())];
            if (core_ptr->modifier == SelectModifier::Count && rng.chance(0.4)) {
                core_ptr->star = true;
            } else {
                std::vector<ColumnInfo> nums = scope.of_kind(ColKind::Num);
                const std::vector<ColumnInfo>& pool = nums.empty() ? scope.columns : nums;
                core_ptr->items.push_back(col(pool[rng.below(pool.size())].ref));
            }
        } else if (grouped && !aggregate) {
            // plain grouped query
        } else if (forced_items < 0 && rng.chance(0.12)) {
            core_ptr->modifier = rng.chance(0.6) ? SelectModifier::Distinct : SelectModifier::All;
        }

        // select list
        if (!aggregate) {
            size_t want = forced_items > 0 ? static_cast<size_t>(forced_items) : 1 + rng.below(3);
            if (forced_items <= 0 && !scope.columns.empty() && rng.chance(0.30)) {
                core_ptr->star = true;
            } else if (scope.columns.empty()) {
                // FROM-less or columnless: constant items
                for (size_t i = 0; i < want; ++i) {
                    core_ptr->items.push_back(
                        rng.chance(0.5) ? num_expr(scope, level, 1) : str_expr(scope, level, 1));
                }
            } else {
                for (size_t i = 0; i < want; ++i) {
                    if (forced_items <= 0 && !this->core() && rng.chance(0.08)) {
                        core_ptr->items.push_back(any_expr(scope, level, 1));
                    } else {
                        core_ptr->items.push_back(
                            col(scope.columns[rng.below(scope.columns.size())].ref));
                    }
                }
            }
        }

        QueryPtr q = make_select(core_ptr);
        if (forced_items < 0) maybe_order_by(*q);
        return q;
    }

    void maybe_order_by(Query& q) {
        if (!rng.chance(0.3)) return;
        std::vector<std::string> candidates = order_candidates(q);
        if (candidates.empty()) return;
        q.order_by = OrderBy{candidates[rng.below(candidates.size())], rng.chance(0.5)};
    }

    // Column names that survive into the query's output schema.
    static std::vector<std::string> order_candidates(const Query& q) {
        std::vector<std::string> out;
        if (q.is_set()) return order_candidates(*q.set->left);
        const SelectCore& core = *q.core;
        if (modifier_is_aggregate(core.modifier)) {
            if (core.group_by) out.push_back(*core.group_by);
            return out;
        }
        if (core.star) {
            // star keeps the input schema; without tracked column names,
            // fall back to the group key when present
            if (core.group_by) out.push_back(*core.group_by);
            return out;
        }
        for (const ExprPtr& item : core.items) {
            if (item->kind == ExprKind::Column) out.push_back(item->name);
        }
        return out;
    }
};

}  // namespace

QueryPtr generate_query(const Catalog& catalog, Rng& rng, GenProfile profile) {
    if (catalog.tables.empty()) {
        throw EngineError(ErrorKind::Schema, "generator needs a nonempty catalog");
    }
    Gen gen{catalog, rng, profile};
    return gen.gen_query_at(1, -1);
}

// ---- mutation ----

namespace {

// Collects assignable expression slots of a query, each tagged with the
// query level it sits at (for the subquery-level rules).
struct ExprSite {
    ExprPtr* slot;
    int level;
    bool in_select_item;
};

void collect_expr_sites(ExprPtr& e, int level, bool in_item, std::vector<ExprSite>& out) {
    out.push_back({&e, level, in_item});
    for (ExprPtr& kid : e->kids) collect_expr_sites(kid, level, in_item, out);
    // subquery bodies are mutated through query-level rules only
}

void collect_query_sites(Query& q, int level, std::vector<ExprSite>& out) {
    if (q.is_set()) {
        collect_query_sites(*q.set->left, level + 1, out);
        collect_query_sites(*q.set->right, level + 1, out);
        return;
    }
    SelectCore& core = *q.core;
    for (ExprPtr& item : core.items) collect_expr_sites(item, level, true, out);
    for (TableRef& ref : core.from) {
        if (ref.on) collect_expr_sites(ref.on, level, false, out);
    }
    if (core.where) collect_expr_sites(core.where, level, false, out);
    if (core.having) collect_expr_sites(core.having, level, false, out);
}

std::vector<SelectCore*> collect_cores(Query& q) {
    if (!q.is_set()) return {q.core.get()};
    std::vector<SelectCore*> out = collect_cores(*q.set->left);
    for (SelectCore* c : collect_cores(*q.set->right)) out.push_back(c);
    return out;
}

// Scope visible to a core's clauses, rebuilt for mutations that need new
// column references.
GenScope scope_of(const SelectCore& core, const Catalog& catalog, Gen& gen) {
    GenScope scope;
    for (const TableRef& ref : core.from) {
        bool qualified = core.from.size() > 1 || ref.joined;
        if (ref.joined) {
            if (catalog.has(ref.left)) gen.add_table_columns(scope, ref.left, true);
            if (catalog.has(ref.right)) gen.add_table_columns(scope, ref.right, true);
        } else if (catalog.has(ref.table)) {
            gen.add_table_columns(scope, ref.table, qualified);
        }
    }
    return scope;
}

bool apply_mutation(Query& q, int rule_id, const Catalog& catalog, Rng& rng, GenProfile profile) {
    Gen gen{catalog, rng, profile};
    std::vector<ExprSite> sites;
    collect_query_sites(q, 1, sites);
    std::vector<SelectCore*> cores = collect_cores(q);
    SelectCore* root_core = q.is_set() ? nullptr : q.core.get();

    auto pick_site = [&](const std::function<bool(const ExprSite&)>& pred) -> ExprSite* {
        std::vector<ExprSite*> matching;
        for (ExprSite& s : sites) {
            if (pred(s)) matching.push_back(&s);
        }
        if (matching.empty()) return nullptr;
        return matching[rng.below(matching.size())];
    };

    switch (rule_id) {
        case 1: {  // replace operators within the same family
            ExprSite* site = pick_site([](const ExprSite& s) {
                ExprKind k = (*s.slot)->kind;
                return k == ExprKind::And || k == ExprKind::Or || k == ExprKind::Xor ||
                       k == ExprKind::Compare || k == ExprKind::Arith;
            });
            if (!site) return false;
            Expr& e = **site->slot;
            if (e.kind == ExprKind::Compare) {
                CompareOp old = e.cmp;
                do {
                    e.cmp = static_cast<CompareOp>(rng.below(6));
                } while (e.cmp == old);
            } else if (e.kind == ExprKind::Arith) {
                ArithOp old = e.arith;
                do {
                    e.arith = static_cast<ArithOp>(rng.below(4));
                } while (e.arith == old);
            } else {
                static const ExprKind logics[] = {ExprKind::And, ExprKind::Or, ExprKind::Xor};
                ExprKind old = e.kind;
                do {
                    e.kind = logics[rng.below(3)];
                } while (e.kind == old);
            }
            return true;
        }
        case 2: {  // replace clause keywords within the same family
            std::vector<int> options;
            if (q.order_by && root_core && !root_core->group_by) options.push_back(0);
            if (root_core && root_core->group_by && !root_core->having && !q.order_by &&
                !modifier_is_aggregate(root_core->modifier)) {
                options.push_back(1);
            }
            for (SelectCore* c : cores) {
                if (modifier_is_aggregate(c->modifier)) options.push_back(2);
                if (c->modifier == SelectModifier::Distinct || c->modifier == SelectModifier::All) {
                    options.push_back(3);
                }
            }
            if (q.is_set()) options.push_back(4);
            for (SelectCore* c : cores) {
                for (TableRef& ref : c->from) {
                    if (ref.joined) options.push_back(5);
                }
            }
            if (options.empty()) return false;
            switch (options[rng.below(options.size())]) {
                case 0: {  // ORDER BY -> GROUP BY
                    root_core->group_by = q.order_by->column;
                    q.order_by.reset();
                    return true;
                }
                case 1: {  // GROUP BY -> ORDER BY
                    q.order_by = OrderBy{*root_core->group_by, rng.chance(0.5)};
                    root_core->group_by.reset();
                    return true;
                }
                case 2: {  // aggregate <-> aggregate
                    std::vector<SelectCore*> aggs;
                    for (SelectCore* c : cores) {
                        if (modifier_is_aggregate(c->modifier)) aggs.push_back(c);
                    }
                    SelectCore* c = aggs[rng.below(aggs.size())];
                    static const std::vector<SelectModifier> pool = {
                        SelectModifier::Max, SelectModifier::Min, SelectModifier::Sum,
                        SelectModifier::Count, SelectModifier::Avg};
                    SelectModifier old = c->modifier;
                    do {
                        c->modifier = pool[rng.below(pool.size())];
                    } while (c->modifier == old);
                    if (c->star && c->modifier != SelectModifier::Count) {
                        c->star = false;
                        GenScope scope = scope_of(*c, catalog, gen);
                        if (scope.columns.empty()) return false;
                        c->items = {col(scope.columns[rng.below(scope.columns.size())].ref)};
                    }
                    return true;
                }
                case 3: {  // DISTINCT <-> ALL
                    std::vector<SelectCore*> filters;
                    for (SelectCore* c : cores) {
                        if (c->modifier == SelectModifier::Distinct ||
                            c->modifier == SelectModifier::All) {
                            filters.push_back(c);
                        }
                    }
                    SelectCore* c = filters[rng.below(filters.size())];
                    c->modifier = c->modifier == SelectModifier::Distinct ? SelectModifier::All
                                                                          : SelectModifier::Distinct;
                    return true;
                }
                case 4: {  // set op <-> set op
                    SetOpKind old = q.set->op;
                    do {
                        q.set->op = static_cast<SetOpKind>(rng.below(6));
                    } while (q.set->op == old);
                    return true;
                }
                default: {  // join kind <-> join kind
                    std::vector<TableRef*> joins;
                    for (SelectCore* c : cores) {
                        for (TableRef& ref : c->from) {
                            if (ref.joined) joins.push_back(&ref);
                        }
                    }
                    TableRef* ref = joins[rng.below(joins.size())];
                    bool was_qualified = ref->on != nullptr;
                    if (was_qualified) {
                        static const std::vector<JoinKind> pool = {JoinKind::Inner, JoinKind::Left,
                                                                   JoinKind::Right, JoinKind::Full};
                        JoinKind old = ref->kind;
                        do {
                            ref->kind = pool[rng.below(pool.size())];
                        } while (ref->kind == old);
                    } else {
                        ref->kind = ref->kind == JoinKind::Cross ? JoinKind::Natural : JoinKind::Cross;
                    }
                    return true;
                }
            }
        }
        case 3: {  // add operators: wrap a boolean-position site in an IS test or NOT
            ExprSite* site = pick_site([](const ExprSite& s) { return !s.in_select_item; });
            if (!site) return false;
            ExprPtr inner = *site->slot;
            if (rng.chance(0.7)) {
                *site->slot = is_test(inner, static_cast<IsOp>(rng.below(4)), rng.chance(0.5));
            } else {
                *site->slot = not_of(inner);
            }
            return true;
        }
        case 4: {  // add clause keywords
            std::vector<int> options;
            if (root_core && !root_core->where && !root_core->from.empty()) options.push_back(0);
            if (!q.order_by) options.push_back(1);
            if (root_core && !root_core->group_by && !root_core->from.empty() &&
                root_core->modifier == SelectModifier::None) {
                options.push_back(2);
            }
            if (root_core && root_core->group_by && !root_core->having) options.push_back(3);
            if (root_core && root_core->modifier == SelectModifier::None && !root_core->star &&
                !root_core->items.empty()) {
                options.push_back(4);
            }
            if (options.empty()) return false;
            switch (options[rng.below(options.size())]) {
                case 0: {
                    GenScope scope = scope_of(*root_core, catalog, gen);
                    root_core->where = gen.bool_expr(scope, 1, 1);
                    return true;
                }
                case 1: {
                    std::vector<std::string> candidates = Gen::order_candidates(q);
                    if (candidates.empty()) return false;
                    q.order_by = OrderBy{candidates[rng.below(candidates.size())], rng.chance(0.5)};
                    return true;
                }
                case 2: {
                    GenScope scope = scope_of(*root_core, catalog, gen);
                    if (scope.columns.empty()) return false;
                    root_core->group_by = scope.columns[rng.below(scope.columns.size())].ref;
                    return true;
                }
                case 3: {
                    GenScope key_scope;
                    key_scope.columns.push_back({*root_core->group_by, ColKind::Any});
                    root_core->having = gen.bool_expr(key_scope, 1, 1);
                    return true;
                }
                default:
                    root_core->modifier =
                        rng.chance(0.5) ? SelectModifier::Distinct : SelectModifier::All;
                    return true;
            }
        }
        case 5: {  // delete operators: collapse a binary node to one operand
            ExprSite* site = pick_site([](const ExprSite& s) {
                ExprKind k = (*s.slot)->kind;
                return k == ExprKind::And || k == ExprKind::Or || k == ExprKind::Xor ||
                       k == ExprKind::Not || k == ExprKind::Compare || k == ExprKind::Arith ||
                       k == ExprKind::Concat;
            });
            if (!site) return false;
            Expr& e = **site->slot;
            *site->slot = e.kids[rng.below(e.kids.size())];
            return true;
        }
        case 6: {  // delete clause keywords
            std::vector<int> options;
            if (root_core && root_core->where) options.push_back(0);
            if (q.order_by) options.push_back(1);
            if (root_core && root_core->group_by && !modifier_is_aggregate(root_core->modifier)) {
                options.push_back(2);
            }
            if (root_core && root_core->having) options.push_back(3);
            for (SelectCore* c : cores) {
                if (c->modifier == SelectModifier::Distinct || c->modifier == SelectModifier::All) {
                    options.push_back(4);
                }
            }
            if (options.empty()) return false;
            switch (options[rng.below(options.size())]) {
                case 0: root_core->where = nullptr; return true;
                case 1: q.order_by.reset(); return true;
                case 2:
                    root_core->group_by.reset();
                    root_core->having = nullptr;
                    return true;
                case 3: root_core->having = nullptr; return true;
                default: {
                    for (SelectCore* c : cores) {
                        if (c->modifier == SelectModifier::Distinct ||
                            c->modifier == SelectModifier::All) {
                            c->modifier = SelectModifier::None;
                            return true;
                        }
                    }
                    return false;
                }
            }
        }
        case 7: {  // constants <-> column references
            SelectCore* ctx = root_core ? root_core : cores[rng.below(cores.size())];
            GenScope scope = scope_of(*ctx, catalog, gen);
            bool to_column = !scope.columns.empty() && rng.chance(0.6);
            if (to_column) {
                ExprSite* site = pick_site([](const ExprSite& s) {
                    return (*s.slot)->kind == ExprKind::Literal && !(*s.slot)->lit.is_null();
                });
                if (!site) return false;
                *site->slot = col(scope.columns[rng.below(scope.columns.size())].ref);
                return true;
            }
            ExprSite* site =
                pick_site([](const ExprSite& s) { return (*s.slot)->kind == ExprKind::Column; });
            if (!site) return false;
            *site->slot = lit(gen.random_literal_value());
            return true;
        }
        case 8: {  // convert a parameter's data type
            ExprSite* site =
                pick_site([](const ExprSite& s) { return (*s.slot)->kind == ExprKind::Literal; });
            if (!site) return false;
            Expr& e = **site->slot;
            ValueKind old = e.lit.kind();
            Value fresh;
            do {
                fresh = gen.random_literal_value();
            } while (fresh.kind() == old);
            e.lit = fresh;
            return true;
        }
        case 9: {  // add parameters: extra conjunct or IN element
            std::vector<Expr*> in_nodes;
            for (ExprSite& s : sites) {
                if ((*s.slot)->kind == ExprKind::InList) in_nodes.push_back(s.slot->get());
            }
            bool extend_in = !in_nodes.empty() && rng.chance(0.4);
            if (extend_in) {
                Expr* in_node = in_nodes[rng.below(in_nodes.size())];
                SelectCore* ctx = root_core ? root_core : cores[0];
                GenScope scope = scope_of(*ctx, catalog, gen);
                in_node->kids.push_back(gen.num_leaf(scope));
                return true;
            }
            if (!root_core || root_core->from.empty()) return false;
            GenScope scope = scope_of(*root_core, catalog, gen);
            ExprPtr extra = gen.bool_expr(scope, 1, 0);
            if (root_core->where) {
                root_core->where = logic(rng.chance(0.5) ? ExprKind::And : ExprKind::Xor,
                                         root_core->where, extra);
            } else {
                root_core->where = extra;
            }
            return true;
        }
        case 10: {  // delete parameters
            std::vector<Expr*> in_nodes;
            for (ExprSite& s : sites) {
                if ((*s.slot)->kind == ExprKind::InList && (*s.slot)->kids.size() > 2) {
                    in_nodes.push_back(s.slot->get());
                }
            }
            if (!in_nodes.empty() && rng.chance(0.4)) {
                Expr* in_node = in_nodes[rng.below(in_nodes.size())];
                size_t victim = 1 + rng.below(in_node->kids.size() - 1);
                in_node->kids.erase(in_node->kids.begin() + static_cast<long>(victim));
                return true;
            }
            ExprSite* site = pick_site([](const ExprSite& s) {
                ExprKind k = (*s.slot)->kind;
                return (k == ExprKind::And || k == ExprKind::Or || k == ExprKind::Xor) &&
                       !s.in_select_item;
            });
            if (!site) return false;
            Expr& e = **site->slot;
            *site->slot = e.kids[0];
            return true;
        }
        case 11: {  // replace a whole condition with a subquery predicate
            if (!root_core || root_core->from.empty()) return false;
            if (!root_core->where) return false;
            root_core->where = exists(gen.gen_query_at(2, 0));
            return true;
        }
        case 12: {  // add a subquery predicate
            if (!root_core || root_core->from.empty()) return false;
            GenScope scope = scope_of(*root_core, catalog, gen);
            ExprPtr pred;
            if (rng.chance(0.5)) {
                pred = exists(gen.gen_query_at(2, 0));
            } else {
                pred = compare(static_cast<CompareOp>(rng.below(6)), gen.num_leaf(scope),
                               scalar_subquery(gen.gen_query_at(2, 1)));
            }
            if (root_core->where) {
                root_core->where =
                    logic(rng.chance(0.5) ? ExprKind::And : ExprKind::Xor, root_core->where, pred);
            } else {
                root_core->where = pred;
            }
            return true;
        }
        case 13: {  // delete subqueries / whole clause groups
            std::vector<ExprSite*> subq;
            for (ExprSite& s : sites) {
                ExprKind k = (*s.slot)->kind;
                if (k == ExprKind::Exists || k == ExprKind::Subquery) {
                    subq.push_back(&s);
                }
            }
            if (!subq.empty()) {
                ExprSite* site = subq[rng.below(subq.size())];
                *site->slot = lit((*site->slot)->kind == ExprKind::Exists ? Value::boolean(true)
                                                                          : Value::integer(1));
                return true;
            }
            if (root_core && root_core->group_by && !modifier_is_aggregate(root_core->modifier)) {
                root_core->group_by.reset();
                root_core->having = nullptr;
                return true;
            }
            return false;
        }
        default: return false;
    }
}

}  // namespace

const std::vector<MutationRule>& mutation_rules() {
    static const std::vector<MutationRule> rules = {
        {1, "keyword", "replace operators"},
        {2, "keyword", "replace keywords"},
        {3, "keyword", "add operators"},
        {4, "keyword", "add keywords"},
        {5, "keyword", "delete operators"},
        {6, "keyword", "delete keywords"},
        {7, "rule", "convert constants to column references"},
        {8, "rule", "convert parameter data types"},
        {9, "rule", "add parameters"},
        {10, "rule", "delete parameters"},
        {11, "subquery", "replace subqueries"},
        {12, "subquery", "add subqueries"},
        {13, "subquery", "delete subqueries"},
    };
    return rules;
}

std::optional<QueryPtr> mutate(const Query& q, int rule_id, const Catalog& catalog, Rng& rng,
                               GenProfile profile) {
    QueryPtr clone = clone_query(q);
    if (!apply_mutation(*clone, rule_id, catalog, rng, profile)) return std::nullopt;
    if (!validate(*clone, catalog).ok) return std::nullopt;
    return clone;
}

// ---- validation ----

namespace {

struct AttrScope {
    std::string table_name;
    std::vector<std::string> attrs;
};

int resolve_static(const std::string& ref, const std::vector<AttrScope>& scopes);

void check_expr_static(const Expr& e, const std::vector<AttrScope>& scopes, const Catalog& catalog);

std::vector<std::string> check_query_static(const Query& q, const Catalog& catalog,
                                            const std::vector<AttrScope>& outer);

int resolve_static(const std::string& ref, const std::vector<AttrScope>& scopes) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        int idx = resolve_in_attrs(ref, it->attrs, it->table_name);
        if (idx >= 0) return idx;
    }
    throw EngineError(ErrorKind::UnknownColumn, "unknown column '" + ref + "'");
}

void check_expr_static(const Expr& e, const std::vector<AttrScope>& scopes,
                       const Catalog& catalog) {
    switch (e.kind) {
        case ExprKind::Column: resolve_static(e.name, scopes); return;
        case ExprKind::Exists:
        case ExprKind::Subquery: check_query_static(*e.sub, catalog, scopes); return;
        default: break;
    }
    for (const ExprPtr& kid : e.kids) check_expr_static(*kid, scopes, catalog);
}

// Schema of a table reference, mirroring the executor's qualification.
AttrScope ref_schema(const TableRef& ref, const Catalog& catalog, bool qualify_simple) {
    auto qualified = [&](const std::string& table) {
        const BagTable& t = catalog.table(table);
        std::vector<std::string> attrs;
        for (const std::string& a : t.attributes) attrs.push_back(table + "." + a);
        return attrs;
    };
    if (!ref.joined) {
        const BagTable& t = catalog.table(ref.table);
        if (qualify_simple) return {"", qualified(ref.table)};
        return {ref.table, t.attributes};
    }
    std::vector<std::string> left = qualified(ref.left);
    std::vector<std::string> right = qualified(ref.right);
    std::vector<std::string> attrs = left;
    if (ref.kind == JoinKind::Natural) {
        auto base = [](const std::string& a) {
            size_t dot = a.rfind('.');
            return dot == std::string::npos ? a : a.substr(dot + 1);
        };
        for (const std::string& r : right) {
            bool shared = false;
            for (const std::string& l : left) {
                if (base(l) == base(r)) shared = true;
            }
            if (!shared) attrs.push_back(r);
        }
    } else {
        attrs.insert(attrs.end(), right.begin(), right.end());
    }
    std::unordered_map<std::string, int> seen;
    for (const std::string& a : attrs) {
        if (++seen[a] > 1) {
            throw EngineError(ErrorKind::Schema, "duplicate attribute '" + a + "' after join");
        }
    }
    return {"", attrs};
}

std::vector<std::string> check_query_static(const Query& q, const Catalog& catalog,
                                            const std::vector<AttrScope>& outer) {
    if (q.is_set()) {
        std::vector<std::string> left = check_query_static(*q.set->left, catalog, outer);
        std::vector<std::string> right = check_query_static(*q.set->right, catalog, outer);
        if (left.size() != right.size()) {
            throw EngineError(ErrorKind::Arity, "collection operands have different arity");
        }
        if (q.order_by) {
            std::vector<AttrScope> out_scope = {{"", left}};
            resolve_static(q.order_by->column, out_scope);
        }
        return left;
    }
    const SelectCore& core = *q.core;
    if (core.having && !core.group_by) {
        throw EngineError(ErrorKind::Schema, "HAVING requires GROUP BY");
    }
    if (!core.star && core.items.empty()) {
        throw EngineError(ErrorKind::Schema, "empty select list");
    }
    bool aggregate = modifier_is_aggregate(core.modifier);
    if (aggregate) {
        if (core.star && core.modifier != SelectModifier::Count) {
            throw EngineError(ErrorKind::Schema, "aggregate over * is only valid for COUNT");
        }
        if (!core.star && core.items.size() != 1) {
            throw EngineError(ErrorKind::Schema, "aggregate needs exactly one select item");
        }
    }

    AttrScope current{"", {}};
    if (core.from.empty()) {
        // FROM-less query: constants only
        if (core.star) throw EngineError(ErrorKind::Schema, "SELECT * requires FROM");
    } else if (core.from.size() == 1) {
        current = ref_schema(core.from[0], catalog, false);
    } else {
        current = ref_schema(core.from[0], catalog, true);
        for (size_t i = 1; i < core.from.size(); ++i) {
            AttrScope next = ref_schema(core.from[i], catalog, true);
            for (const std::string& a : next.attrs) current.attrs.push_back(a);
        }
        std::unordered_map<std::string, int> seen;
        for (const std::string& a : current.attrs) {
            if (++seen[a] > 1) {
                throw EngineError(ErrorKind::Schema, "duplicate attribute '" + a + "' after join");
            }
        }
    }

    std::vector<AttrScope> scopes = outer;
    scopes.push_back(current);

    for (const TableRef& ref : core.from) {
        if (!ref.joined) continue;
        bool qualified = ref.kind == JoinKind::Inner || ref.kind == JoinKind::Left ||
                         ref.kind == JoinKind::Right || ref.kind == JoinKind::Full;
        if (qualified != (ref.on != nullptr)) {
            throw EngineError(ErrorKind::Schema, qualified ? "qualified join requires ON"
                                                           : "ON on cross/natural join");
        }
        if (ref.on) {
            std::vector<AttrScope> join_scopes = outer;
            join_scopes.push_back(ref_schema(ref, catalog, true));
            check_expr_static(*ref.on, join_scopes, catalog);
        }
    }
    for (const ExprPtr& item : core.items) check_expr_static(*item, scopes, catalog);
    if (core.where) check_expr_static(*core.where, scopes, catalog);

    std::string group_attr;
    if (core.group_by) {
        int idx = resolve_static(*core.group_by, {current});
        group_attr = current.attrs[static_cast<size_t>(idx)];
    }

    // output schema
    std::vector<std::string> output;
    if (aggregate) {
        std::string label = "?";
        if (core.group_by) {
            output = {group_attr, label};
        } else {
            output = {label};
        }
    } else if (core.star) {
        output = current.attrs;
    } else {
        for (const ExprPtr& item : core.items) {
            output.push_back(item->kind == ExprKind::Column ? item->name : print(*item));
        }
    }

    if (core.having) {
        std::vector<AttrScope> having_scope = outer;
        if (aggregate) {
            having_scope.push_back({"", {group_attr}});
        } else {
            having_scope.push_back(current);
        }
        check_expr_static(*core.having, having_scope, catalog);
    }

    if (q.order_by) {
        std::vector<AttrScope> out_scope = {{current.table_name, output}};
        resolve_static(q.order_by->column, out_scope);
    }
    return output;
}

}  // namespace

Verdict validate(const Query& q, const Catalog& catalog) {
    try {
        std::string text = print(q);
        QueryPtr reparsed = parse(text);
        if (!query_equal(q, *reparsed)) {
            return {false, "print/parse round-trip mismatch"};
        }
        check_query_static(q, catalog, {});
    } catch (const EngineError& e) {
        return {false, std::string(error_kind_name(e.kind())) + ": " + e.what()};
    }
    return {true, ""};
}

// ---- pool and loop ----

void SeedPool::add(QueryPtr q, int source_rule, uint64_t parent) {
    entries_.push_back(PooledQuery{std::move(q), next_id_++, source_rule, parent});
}

const PooledQuery& SeedPool::pick(Rng& rng) const {
    if (entries_.empty()) throw EngineError(ErrorKind::Schema, "seed pool is empty");
    return entries_[rng.below(entries_.size())];
}

SeedPool generate_initial(const Catalog& catalog, size_t n, Rng& rng, GenProfile profile,
                          const std::function<bool(const Query&)>& runtime_screen) {
    SeedPool pool;
    for (size_t i = 0; i < n; ++i) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            QueryPtr q = generate_query(catalog, rng, profile);
            if (!validate(*q, catalog).ok) continue;
            if (runtime_screen && !runtime_screen(*q)) continue;
            pool.add(q, 0, 0);
            break;
        }
    }
    return pool;
}

FuzzStats fuzz_loop(const Catalog& catalog, CoverageLedger& ledger, const std::string& criterion,
                    FuzzBudget budget, Rng& rng, SeedPool& pool,
                    const std::function<void(const AcceptedQuery&)>& sink,
                    const std::function<bool(const Query&)>& runtime_screen, GenProfile profile,
                    bool guided) {
    FuzzStats stats;
    auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (budget.seconds <= 0.0) return false;
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        return elapsed.count() >= budget.seconds;
    };

    while (true) {
        if (budget.rounds > 0 && stats.rounds >= budget.rounds) break;
        if (out_of_time()) break;
        ++stats.rounds;

        bool accepted = false;
        for (int attempt = 0; attempt < kStagnationCap && !accepted; ++attempt) {
            if (out_of_time()) break;
            QueryPtr candidate;
            int rule_id = 0;
            uint64_t parent = 0;
            if (pool.empty()) {
                candidate = generate_query(catalog, rng, profile);
            } else {
                const PooledQuery& seed = pool.pick(rng);
                rule_id = mutation_rules()[rng.below(mutation_rules().size())].id;
                parent = seed.id;
                auto mutated = mutate(*seed.query, rule_id, catalog, rng, profile);
                if (!mutated) continue;
                candidate = *mutated;
            }
            if (!validate(*candidate, catalog).ok) {
                ++stats.rejected_invalid;
                continue;
            }
            if (runtime_screen && !runtime_screen(*candidate)) {
                ++stats.rejected_runtime;
                continue;
            }
            if (guided && !ledger.peek(*candidate).grew(criterion)) {
                ++stats.rejected_no_gain;
                continue;
            }
            ledger.record(*candidate);
            pool.add(candidate, rule_id, parent);
            ++stats.accepted;
            if (sink) sink(AcceptedQuery{candidate, stats.accepted, rule_id, parent});
            accepted = true;
        }
        if (!accepted) {
            // stagnation: fall back to a fresh grammar-directed seed
            ++stats.fallback_seeds;
            for (int attempt = 0; attempt < 50; ++attempt) {
                QueryPtr fresh = generate_query(catalog, rng, profile);
                if (!validate(*fresh, catalog).ok) continue;
                if (runtime_screen && !runtime_screen(*fresh)) continue;
                bool grew = ledger.peek(*fresh).grew(criterion);
                if (guided && grew) {
                    ledger.record(*fresh);
                    pool.add(fresh, 0, 0);
                    ++stats.accepted;
                    if (sink) sink(AcceptedQuery{fresh, stats.accepted, 0, 0});
                } else if (!guided) {
                    ledger.record(*fresh);
                    pool.add(fresh, 0, 0);
                    ++stats.accepted;
                    if (sink) sink(AcceptedQuery{fresh, stats.accepted, 0, 0});
                } else {
                    pool.add(fresh, 0, 0);
                }
                break;
            }
        }
    }
    return stats;
}

namespace {

bool expr_produces_floats(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal:
            if (e.lit.kind() == ValueKind::Float) return true;
            break;
        case ExprKind::Arith:
            if (e.arith == ArithOp::Div) return true;
            break;
        case ExprKind::Ln:
        case ExprKind::ExpFn:
        case ExprKind::Sqrt:
        case ExprKind::Power: return true;
        default: break;
    }
    for (const ExprPtr& kid : e.kids) {
        if (expr_produces_floats(*kid)) return true;
    }
    if (e.sub && produces_floats(*e.sub)) return true;
    return false;
}

}  // namespace

bool produces_floats(const Query& q) {
    if (q.is_set()) {
        return produces_floats(*q.set->left) || produces_floats(*q.set->right);
    }
    const SelectCore& core = *q.core;
    if (core.modifier == SelectModifier::Avg) return true;
    for (const ExprPtr& item : core.items) {
        if (expr_produces_floats(*item)) return true;
    }
    if (core.where && expr_produces_floats(*core.where)) return true;
    if (core.having && expr_produces_floats(*core.having)) return true;
    for (const TableRef& ref : core.from) {
        if (ref.on && expr_produces_floats(*ref.on)) return true;
    }
    return false;
}

}  // namespace sqlsem
