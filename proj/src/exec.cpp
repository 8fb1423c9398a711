#include "sqlsem/exec.hpp"

#include <algorithm>
#include <unordered_map>

#include "sqlsem/coverage.hpp"
#include "sqlsem/eval.hpp"
#include "sqlsem/printer.hpp"

namespace sqlsem {

namespace {

std::string base_name(const std::string& attr) {
    size_t dot = attr.rfind('.');
    return dot == std::string::npos ? attr : attr.substr(dot + 1);
}

const char* agg_name(SelectModifier m) {
    switch (m) {
        case SelectModifier::Max: return "MAX";
        case SelectModifier::Min: return "MIN";
        case SelectModifier::Sum: return "SUM";
        case SelectModifier::Count: return "COUNT";
        case SelectModifier::Avg: return "AVG";
        default: return "";
    }
}

}  // namespace

int resolve_in_attrs(const std::string& ref, const std::vector<std::string>& attrs,
                     const std::string& table_name) {
    size_t dot = ref.rfind('.');
    int found = -1;
    auto note = [&](size_t i) {
        if (found >= 0 && static_cast<size_t>(found) != i) {
            throw EngineError(ErrorKind::AmbiguousColumn, "ambiguous column reference '" + ref + "'");
        }
        found = static_cast<int>(i);
    };
    if (dot != std::string::npos) {
        std::string table = ref.substr(0, dot);
        std::string column = ref.substr(dot + 1);
        for (size_t i = 0; i < attrs.size(); ++i) {
            if (attrs[i] == ref) note(i);
            if (table_name == table && attrs[i] == column) note(i);
        }
        return found;
    }
    for (size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i] == ref || base_name(attrs[i]) == ref) note(i);
    }
    return found;
}

Value resolve_column(const std::string& ref, const EvalEnv& env) {
    for (auto it = env.scopes.rbegin(); it != env.scopes.rend(); ++it) {
        int idx = resolve_in_attrs(ref, it->table->attributes, it->table->name);
        if (idx >= 0) return (*it->row)[static_cast<size_t>(idx)];
    }
    throw EngineError(ErrorKind::UnknownColumn, "unknown column '" + ref + "'");
}

namespace {

BagTable qualify(const BagTable& t) {
    BagTable out;
    out.name = "";
    out.attributes.reserve(t.attributes.size());
    for (const std::string& attr : t.attributes) {
        out.attributes.push_back(attr.find('.') == std::string::npos && !t.name.empty()
                                     ? t.name + "." + attr
                                     : attr);
    }
    out.rows = t.rows;
    return out;
}

void check_unique_attrs(const BagTable& t) {
    for (size_t i = 0; i < t.attributes.size(); ++i) {
        for (size_t j = i + 1; j < t.attributes.size(); ++j) {
            if (t.attributes[i] == t.attributes[j]) {
                throw EngineError(ErrorKind::Schema,
                                  "duplicate attribute '" + t.attributes[i] + "' after join");
            }
        }
    }
}

Row concat_rows(const Row& a, const Row& b) {
    Row out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Shared attribute bases and their per-side indices, for natural-style
// matching (rules 76-78).
struct SharedColumns {
    std::vector<std::pair<size_t, size_t>> pairs;  // (left idx, right idx)
};

SharedColumns shared_columns(const BagTable& l, const BagTable& r) {
    SharedColumns out;
    for (size_t i = 0; i < l.attributes.size(); ++i) {
        for (size_t j = 0; j < r.attributes.size(); ++j) {
            if (base_name(l.attributes[i]) == base_name(r.attributes[j])) {
                out.pairs.emplace_back(i, j);
            }
        }
    }
    return out;
}

bool shared_match(const SharedColumns& shared, const Row& a, const Row& b) {
    for (auto [i, j] : shared.pairs) {
        if (!value_identical(a[i], b[j])) return false;
    }
    return true;
}

bool on_condition_true(const Expr* on, const BagTable& joined_schema, const Row& row,
                       EvalEnv& outer) {
    if (!on) return true;
    outer.scopes.push_back(Scope{&joined_schema, &row});
    Value v = eval_bool(*on, outer);
    outer.scopes.pop_back();
    return v.kind() == ValueKind::Bool && v.as_bool();
}

BagTable cross_product(const BagTable& l, const BagTable& r) {
    BagTable out;
    out.attributes = l.attributes;
    out.attributes.insert(out.attributes.end(), r.attributes.begin(), r.attributes.end());
    check_unique_attrs(out);
    out.rows.reserve(l.rows.size() * r.rows.size());
    for (const Row& a : l.rows) {
        for (const Row& b : r.rows) out.rows.push_back(concat_rows(a, b));
    }
    return out;
}

// Natural join, rule 76: emit joined records only where the shared-column
// projections agree; without shared columns every pair skips (paper mode)
// or the join degenerates to a product (standard mode). Shared columns
// appear once, taking the left side's slots.
BagTable natural_join(const BagTable& l, const BagTable& r, JoinMode mode) {
    SharedColumns shared = shared_columns(l, r);
    BagTable out;
    out.attributes = l.attributes;
    std::vector<size_t> right_keep;
    for (size_t j = 0; j < r.attributes.size(); ++j) {
        bool is_shared = false;
        for (auto [li, rj] : shared.pairs) {
            if (rj == j) is_shared = true;
        }
        if (!is_shared) {
            right_keep.push_back(j);
            out.attributes.push_back(r.attributes[j]);
        }
    }
    check_unique_attrs(out);
    if (shared.pairs.empty()) {
        if (mode == JoinMode::Paper) return out;  // rule 76 skip branch
        for (const Row& a : l.rows) {
            for (const Row& b : r.rows) out.rows.push_back(concat_rows(a, b));
        }
        return out;
    }
    for (const Row& a : l.rows) {
        for (const Row& b : r.rows) {
            if (!shared_match(shared, a, b)) continue;
            Row joined = a;
            for (size_t j : right_keep) joined.push_back(b[j]);
            out.rows.push_back(std::move(joined));
        }
    }
    return out;
}

// Outer joins over the concatenated schema. In paper mode a pair matches
// when the shared-column projections agree (rules 77-78); matched rows
// then pass through the ON filter of the join pipeline, while NULL-padded
// rows for unmatched preserved-side records bypass it, which is exactly
// what makes the RIGHT OUTER JOIN ON 0 scenario produce its padded row.
// Standard mode matches on the ON condition itself. No shared columns in
// paper mode means every pair skips.
BagTable outer_join(JoinKind kind, const BagTable& l, const BagTable& r, const Expr* on,
                    EvalEnv& outer, JoinMode mode) {
    BagTable out;
    out.attributes = l.attributes;
    out.attributes.insert(out.attributes.end(), r.attributes.begin(), r.attributes.end());
    check_unique_attrs(out);

    SharedColumns shared = shared_columns(l, r);
    if (mode == JoinMode::Paper && shared.pairs.empty()) return out;

    std::vector<bool> left_matched(l.rows.size(), false);
    std::vector<bool> right_matched(r.rows.size(), false);
    std::vector<Row> matched_rows;
    for (size_t i = 0; i < l.rows.size(); ++i) {
        for (size_t j = 0; j < r.rows.size(); ++j) {
            Row candidate = concat_rows(l.rows[i], r.rows[j]);
            bool match;
            if (mode == JoinMode::Paper) {
                match = shared_match(shared, l.rows[i], r.rows[j]);
                if (match && !on_condition_true(on, out, candidate, outer)) {
                    // matched pair filtered out by ON; the records still
                    // count as matched, so no padding is added for them
                    left_matched[i] = true;
                    right_matched[j] = true;
                    continue;
                }
            } else {
                match = on_condition_true(on, out, candidate, outer);
            }
            if (match) {
                left_matched[i] = true;
                right_matched[j] = true;
                matched_rows.push_back(std::move(candidate));
            }
        }
    }

    auto pad_left = [&](size_t j) {
        Row padded(l.arity(), Value::null());
        return concat_rows(padded, r.rows[j]);
    };
    auto pad_right = [&](size_t i) {
        Row padded(r.arity(), Value::null());
        return concat_rows(l.rows[i], padded);
    };

    if (kind == JoinKind::Left) {
        for (size_t i = 0; i < l.rows.size(); ++i) {
            if (left_matched[i]) continue;
            out.rows.push_back(pad_right(i));
        }
        size_t insert_at = 0;
        out.rows.insert(out.rows.begin() + insert_at, matched_rows.begin(), matched_rows.end());
    } else if (kind == JoinKind::Right) {
        out.rows = std::move(matched_rows);
        for (size_t j = 0; j < r.rows.size(); ++j) {
            if (!right_matched[j]) out.rows.push_back(pad_left(j));
        }
    } else {  // full
        out.rows = std::move(matched_rows);
        for (size_t i = 0; i < l.rows.size(); ++i) {
            if (!left_matched[i]) out.rows.push_back(pad_right(i));
        }
        for (size_t j = 0; j < r.rows.size(); ++j) {
            if (!right_matched[j]) out.rows.push_back(pad_left(j));
        }
    }
    return out;
}

}  // namespace

BagTable op_join(JoinKind kind, const BagTable& t1, const BagTable& t2, const Expr* on,
                 EvalEnv& outer) {
    bool qualified = kind == JoinKind::Inner || kind == JoinKind::Left || kind == JoinKind::Right ||
                     kind == JoinKind::Full;
    if (qualified && !on) {
        throw EngineError(ErrorKind::Schema, "qualified join requires an ON clause");
    }
    if (!qualified && on) {
        throw EngineError(ErrorKind::Schema, "cross/natural join cannot carry an ON clause");
    }
    JoinMode mode = outer.opts ? outer.opts->join_mode : JoinMode::Paper;
    switch (kind) {
        case JoinKind::Cross: return cross_product(t1, t2);
        case JoinKind::Inner: return cross_product(t1, t2);  // ON filter is the next pipeline step
        case JoinKind::Natural: return natural_join(t1, t2, mode);
        default: return outer_join(kind, t1, t2, on, outer, mode);
    }
}

BagTable op_collection(SetOpKind op, const BagTable& t1, const BagTable& t2, const Faults& faults) {
    if (t1.arity() != t2.arity()) {
        throw EngineError(ErrorKind::Arity, "collection operands have different arity");
    }
    BagTable out;
    out.attributes = t1.attributes;

    std::unordered_map<std::string, size_t> count1, count2;
    for (const Row& r : t1.rows) count1[row_key(r)]++;
    for (const Row& r : t2.rows) count2[row_key(r)]++;

    auto emit_distinct_members = [&](bool need_in_t2, bool exclude_in_t2) {
        std::unordered_map<std::string, bool> emitted;
        auto consider = [&](const Row& r) {
            std::string key = row_key(r);
            if (emitted.count(key)) return;
            bool in2 = count2.count(key) != 0;
            if (need_in_t2 && !in2) return;
            if (exclude_in_t2 && in2) return;
            emitted[key] = true;
            out.rows.push_back(r);
        };
        for (const Row& r : t1.rows) consider(r);
        return emitted;
    };

    switch (op) {
        case SetOpKind::Union: {
            std::unordered_map<std::string, bool> emitted;
            for (const Row& r : t1.rows) {
                if (emitted.emplace(row_key(r), true).second) out.rows.push_back(r);
            }
            for (const Row& r : t2.rows) {
                if (emitted.emplace(row_key(r), true).second) out.rows.push_back(r);
            }
            break;
        }
        case SetOpKind::UnionAll: {
            if (faults.union_all_dedups) {
                std::unordered_map<std::string, bool> emitted;
                for (const Row& r : t1.rows) {
                    if (emitted.emplace(row_key(r), true).second) out.rows.push_back(r);
                }
                for (const Row& r : t2.rows) {
                    if (emitted.emplace(row_key(r), true).second) out.rows.push_back(r);
                }
                break;
            }
            out.rows = t1.rows;
            out.rows.insert(out.rows.end(), t2.rows.begin(), t2.rows.end());
            break;
        }
        case SetOpKind::Intersect: emit_distinct_members(true, false); break;
        case SetOpKind::IntersectAll: {
            // multiplicity min(x1, x2), in t1 order
            std::unordered_map<std::string, size_t> emitted;
            for (const Row& r : t1.rows) {
                std::string key = row_key(r);
                auto it = count2.find(key);
                if (it == count2.end()) continue;
                size_t limit = std::min(count1[key], it->second);
                if (emitted[key] < limit) {
                    emitted[key]++;
                    out.rows.push_back(r);
                }
            }
            break;
        }
        case SetOpKind::Except: emit_distinct_members(false, true); break;
        case SetOpKind::ExceptAll: {
            // multiplicity max(0, x1 - x2); the fault drops the clamp and
            // emits |x1 - x2| instead
            std::unordered_map<std::string, size_t> emitted;
            for (const Row& r : t1.rows) {
                std::string key = row_key(r);
                size_t c1 = count1[key];
                size_t c2 = count2.count(key) ? count2[key] : 0;
                size_t limit = c1 > c2 ? c1 - c2 : 0;
                if (faults.except_all_unclamped && c2 > c1) limit = c2 - c1;
                if (emitted[key] < limit) {
                    emitted[key]++;
                    out.rows.push_back(r);
                }
            }
            break;
        }
    }
    return out;
}

BagTable op_filter(bool distinct, const BagTable& t) {
    if (!distinct) return t;
    BagTable out;
    out.name = t.name;
    out.attributes = t.attributes;
    std::unordered_map<std::string, bool> seen;
    for (const Row& r : t.rows) {
        if (seen.emplace(row_key(r), true).second) out.rows.push_back(r);
    }
    return out;
}

Value aggregate_value(SelectModifier agg, const BagTable& projected) {
    if (agg == SelectModifier::Count) {
        if (projected.arity() != 1) {
            return Value::integer(static_cast<int64_t>(projected.rows.size()));
        }
        int64_t n = 0;
        for (const Row& r : projected.rows) {
            if (!r[0].is_null()) ++n;
        }
        return Value::integer(n);
    }
    if (projected.arity() != 1) {
        throw EngineError(ErrorKind::Schema, "aggregate needs a single projected column");
    }
    bool has_value = false;
    Value best;
    int64_t int_sum = 0;
    double float_sum = 0.0;
    bool float_mode = false;
    int64_t non_null = 0;
    for (const Row& r : projected.rows) {
        const Value& raw = r[0];
        if (raw.is_null()) continue;
        ++non_null;
        switch (agg) {
            case SelectModifier::Max:
                if (!has_value || value_order(raw, best) > 0) best = raw;
                break;
            case SelectModifier::Min:
                if (!has_value || value_order(raw, best) < 0) best = raw;
                break;
            case SelectModifier::Sum:
            case SelectModifier::Avg: {
                Value n = cast_to_num(raw);
                if (n.kind() == ValueKind::Int && !float_mode) {
                    if (__builtin_add_overflow(int_sum, n.as_int(), &int_sum)) {
                        throw EngineError(ErrorKind::Domain, "SUM overflow");
                    }
                } else {
                    if (!float_mode) {
                        float_mode = true;
                        float_sum = static_cast<double>(int_sum);
                    }
                    float_sum += n.numeric();
                }
                break;
            }
            default: break;
        }
        has_value = true;
    }
    if (!has_value) {
        return agg == SelectModifier::Count ? Value::integer(0) : Value::null();
    }
    switch (agg) {
        case SelectModifier::Max:
        case SelectModifier::Min: return best;
        case SelectModifier::Sum:
            return float_mode ? Value::real(float_sum) : Value::integer(int_sum);
        case SelectModifier::Avg: {
            double total = float_mode ? float_sum : static_cast<double>(int_sum);
            return Value::real(total / static_cast<double>(non_null));
        }
        default: return Value::null();
    }
}

BagTable op_aggregate(SelectModifier agg, const BagTable& projected, std::string out_attr) {
    BagTable out;
    out.attributes = {std::move(out_attr)};
    out.rows.push_back({aggregate_value(agg, projected)});
    return out;
}

GroupedTable op_group_by(const std::string& column, const BagTable& t) {
    int idx = resolve_in_attrs(column, t.attributes, t.name);
    if (idx < 0) {
        throw EngineError(ErrorKind::UnknownColumn, "unknown GROUP BY column '" + column + "'");
    }
    GroupedTable out;
    out.key_column = t.attributes[static_cast<size_t>(idx)];
    std::unordered_map<std::string, size_t> slot;
    for (const Row& r : t.rows) {
        const Value& key = r[static_cast<size_t>(idx)];
        std::string hash = value_key(key);
        auto it = slot.find(hash);
        if (it == slot.end()) {
            slot.emplace(hash, out.groups.size());
            BagTable part;
            part.name = t.name;
            part.attributes = t.attributes;
            part.rows.push_back(r);
            out.groups.emplace_back(key, std::move(part));
        } else {
            out.groups[it->second].second.rows.push_back(r);
        }
    }
    return out;
}

BagTable op_where(const Expr& cond, const BagTable& t, EvalEnv& outer) {
    bool keep_unknown = outer.opts && outer.opts->faults.where_keeps_unknown;
    BagTable out;
    out.name = t.name;
    out.attributes = t.attributes;
    for (const Row& r : t.rows) {
        outer.scopes.push_back(Scope{&t, &r});
        Value v = eval_bool(cond, outer);
        outer.scopes.pop_back();
        bool keep = v.kind() == ValueKind::Bool && v.as_bool();
        if (keep_unknown && v.is_null()) keep = true;
        if (keep) out.rows.push_back(r);
    }
    return out;
}

BagTable op_order_by(const std::string& column, bool desc, const BagTable& t) {
    int idx = resolve_in_attrs(column, t.attributes, t.name);
    if (idx < 0) {
        throw EngineError(ErrorKind::UnknownColumn, "unknown ORDER BY column '" + column + "'");
    }
    BagTable out = t;
    size_t key = static_cast<size_t>(idx);
    std::stable_sort(out.rows.begin(), out.rows.end(), [&](const Row& a, const Row& b) {
        int c = value_order(a[key], b[key]);
        return desc ? c > 0 : c < 0;
    });
    return out;
}

BagTable op_select_columns(const std::vector<std::string>& columns, const BagTable& t) {
    std::vector<size_t> idx;
    for (const std::string& c : columns) {
        int i = resolve_in_attrs(c, t.attributes, t.name);
        if (i < 0) throw EngineError(ErrorKind::UnknownColumn, "unknown column '" + c + "'");
        idx.push_back(static_cast<size_t>(i));
    }
    BagTable out;
    out.name = t.name;
    for (size_t i : idx) out.attributes.push_back(t.attributes[i]);
    for (const Row& r : t.rows) {
        Row projected;
        projected.reserve(idx.size());
        for (size_t i : idx) projected.push_back(r[i]);
        out.rows.push_back(std::move(projected));
    }
    return out;
}

namespace {

void sink_rule(EvalEnv& env, const std::string& rule) {
    if (rule.empty()) return;
    if (env.opts && env.opts->rule_sink) env.opts->rule_sink->push_back(rule);
}

std::string select_item_label(const Expr& e) { return print(e); }

// Evaluates the select items against each row (generalized projection
// covering the column-list, constant and star-free shapes).
BagTable project_items(const std::vector<ExprPtr>& items, const BagTable& t, EvalEnv& env) {
    BagTable out;
    out.name = t.name;
    for (const ExprPtr& item : items) {
        out.attributes.push_back(item->kind == ExprKind::Column ? item->name
                                                                : select_item_label(*item));
    }
    for (const Row& r : t.rows) {
        env.scopes.push_back(Scope{&t, &r});
        Row projected;
        projected.reserve(items.size());
        for (const ExprPtr& item : items) projected.push_back(eval_value(*item, env));
        env.scopes.pop_back();
        out.rows.push_back(std::move(projected));
    }
    return out;
}

BagTable dual_table() {
    BagTable out;
    out.rows.push_back({});
    return out;
}

BagTable table_for_ref(const TableRef& ref, EvalEnv& env, bool qualify_simple) {
    const Catalog& catalog = *env.catalog;
    if (!ref.joined) {
        BagTable t = catalog.table(ref.table);
        return qualify_simple ? qualify(t) : t;
    }
    BagTable l = qualify(catalog.table(ref.left));
    BagTable r = qualify(catalog.table(ref.right));
    sink_rule(env, std::string(join_kind_text(ref.kind)) + "/pair");
    BagTable joined = op_join(ref.kind, l, r, ref.on.get(), env);
    if (ref.kind == JoinKind::Inner && ref.on) {
        sink_rule(env, "ON/cond");
        joined = op_where(*ref.on, joined, env);
    }
    return joined;
}

// The SELECT clause for non-aggregate queries: star is the identity
// projection, a lone NULL item yields the empty table, constants append a
// column of that constant, and column lists project positionally.
BagTable execute_plain_select(const SelectCore& core, const BagTable& current, EvalEnv& env) {
    sink_rule(env, select_rule_of(core));
    if (core.star) return current;
    if (core.items.size() == 1 && core.items[0]->kind == ExprKind::Literal &&
        core.items[0]->lit.is_null()) {
        BagTable out;
        out.attributes = {"NULL"};
        return out;
    }
    return project_items(core.items, current, env);
}

BagTable execute_core(const SelectCore& core, EvalEnv& env) {
    // FROM (joins first, then chained cross joins per the composite rules)
    BagTable current;
    if (core.from.empty()) {
        current = dual_table();
    } else if (core.from.size() == 1) {
        current = table_for_ref(core.from[0], env, /*qualify_simple=*/false);
        sink_rule(env, core.from[0].joined ? "FROM/join" : "FROM/single");
    } else {
        sink_rule(env, "FROM/list");
        current = qualify(table_for_ref(core.from[0], env, true));
        for (size_t i = 1; i < core.from.size(); ++i) {
            BagTable next = table_for_ref(core.from[i], env, true);
            current = cross_product(current, qualify(next));
        }
    }

    // WHERE
    if (core.where) {
        sink_rule(env, "WHERE/cond");
        current = op_where(*core.where, current, env);
    }

    bool aggregate = modifier_is_aggregate(core.modifier);

    auto project_for_aggregate = [&](const BagTable& input) -> BagTable {
        if (core.star) {
            if (core.modifier != SelectModifier::Count) {
                throw EngineError(ErrorKind::Schema, "aggregate over * is only valid for COUNT");
            }
            return input;
        }
        if (core.items.size() != 1) {
            throw EngineError(ErrorKind::Schema, "aggregate needs exactly one select item");
        }
        return project_items(core.items, input, env);
    };
    auto aggregate_label = [&]() {
        std::string inner = core.star ? "*" : select_item_label(*core.items[0]);
        return std::string(agg_name(core.modifier)) + "(" + inner + ")";
    };

    // GROUP BY, aggregates per partition, HAVING, SELECT
    if (core.group_by) {
        sink_rule(env, "GROUP BY/column");
        GroupedTable grouped = op_group_by(*core.group_by, current);
        if (aggregate) {
            sink_rule(env, select_rule_of(core));
            sink_rule(env, modifier_rule_of(core));
            BagTable result;
            result.attributes = {grouped.key_column, aggregate_label()};
            for (auto& [key, partition] : grouped.groups) {
                BagTable projected = project_for_aggregate(partition);
                result.rows.push_back({key, aggregate_value(core.modifier, projected)});
            }
            current = std::move(result);
        } else {
            // no aggregate: one representative record per group, input order
            BagTable result;
            result.name = current.name;
            result.attributes = current.attributes;
            for (auto& [key, partition] : grouped.groups) {
                result.rows.push_back(partition.rows.front());
            }
            current = std::move(result);
        }
        if (core.having) {
            sink_rule(env, "HAVING/cond");
            current = op_where(*core.having, current, env);
        }
        if (!aggregate) {
            current = execute_plain_select(core, current, env);
        }
    } else {
        if (core.having) {
            throw EngineError(ErrorKind::Schema, "HAVING requires GROUP BY");
        }
        if (aggregate) {
            sink_rule(env, select_rule_of(core));
            sink_rule(env, modifier_rule_of(core));
            BagTable projected = project_for_aggregate(current);
            current = op_aggregate(core.modifier, projected, aggregate_label());
        } else {
            current = execute_plain_select(core, current, env);
        }
    }

    // DISTINCT / ALL
    if (core.modifier == SelectModifier::Distinct) {
        sink_rule(env, "DISTINCT/table");
        current = op_filter(true, current);
    } else if (core.modifier == SelectModifier::All) {
        sink_rule(env, "ALL/table");
        current = op_filter(false, current);
    }
    return current;
}

}  // namespace

BagTable execute_subquery(const Query& q, EvalEnv& outer) {
    BagTable result;
    if (q.is_set()) {
        BagTable l = execute_subquery(*q.set->left, outer);
        BagTable r = execute_subquery(*q.set->right, outer);
        if (outer.opts && outer.opts->rule_sink) {
            outer.opts->rule_sink->push_back(std::string(set_op_text(q.set->op)) + "/pair");
        }
        result = op_collection(q.set->op, l, r, outer.opts ? outer.opts->faults : Faults{});
    } else {
        result = execute_core(*q.core, outer);
    }
    if (q.order_by) {
        if (outer.opts && outer.opts->rule_sink) {
            outer.opts->rule_sink->push_back(q.order_by->desc ? "ORDER BY/desc" : "ORDER BY/asc");
        }
        result = op_order_by(q.order_by->column, q.order_by->desc, result);
    }
    return result;
}

BagTable execute(const Query& q, const Catalog& catalog, const ExecOptions& opts) {
    EvalEnv env;
    env.catalog = &catalog;
    env.opts = &opts;
    return execute_subquery(q, env);
}

}  // namespace sqlsem
