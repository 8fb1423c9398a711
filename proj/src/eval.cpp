#include "sqlsem/eval.hpp"

#include <cmath>
#include <limits>

#include "sqlsem/coverage.hpp"

namespace sqlsem {

namespace {

constexpr int64_t kInt64Min = std::numeric_limits<int64_t>::min();

bool is_true(const Value& v) { return v.kind() == ValueKind::Bool && v.as_bool(); }
bool is_false(const Value& v) { return v.kind() == ValueKind::Bool && !v.as_bool(); }

// -1 / 0 / 1 over two non-null numerics; exact for int pairs.
int compare_numeric(const Value& l, const Value& r) {
    if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int) {
        int64_t a = l.as_int(), b = r.as_int();
        return a < b ? -1 : (a > b ? 1 : 0);
    }
    long double a = l.kind() == ValueKind::Int ? static_cast<long double>(l.as_int())
                                               : static_cast<long double>(l.as_float());
    long double b = r.kind() == ValueKind::Int ? static_cast<long double>(r.as_int())
                                               : static_cast<long double>(r.as_float());
    return a < b ? -1 : (a > b ? 1 : 0);
}

Value eval_compare(CompareOp op, const Value& l, const Value& r) {
    if (l.is_null() || r.is_null()) return Value::null();
    int c = compare_numeric(l, r);
    switch (op) {
        case CompareOp::Eq: return Value::boolean(c == 0);
        case CompareOp::Ne: return Value::boolean(c != 0);
        case CompareOp::Lt: return Value::boolean(c < 0);
        case CompareOp::Gt: return Value::boolean(c > 0);
        case CompareOp::Le: return Value::boolean(c <= 0);
        case CompareOp::Ge: return Value::boolean(c >= 0);
    }
    return Value::null();
}

Value eval_arith(ArithOp op, const Value& l, const Value& r) {
    if (l.is_null() || r.is_null()) return Value::null();
    bool both_int = l.kind() == ValueKind::Int && r.kind() == ValueKind::Int;
    if (op == ArithOp::Div) {
        double divisor = r.numeric();
        if (divisor == 0.0) throw EngineError(ErrorKind::Domain, "division by zero");
        return Value::real(l.numeric() / divisor);
    }
    if (both_int) {
        int64_t a = l.as_int(), b = r.as_int(), out = 0;
        bool overflow = false;
        switch (op) {
            case ArithOp::Add: overflow = __builtin_add_overflow(a, b, &out); break;
            case ArithOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
            case ArithOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
            default: break;
        }
        if (overflow) throw EngineError(ErrorKind::Domain, "integer arithmetic overflow");
        return Value::integer(out);
    }
    double a = l.numeric(), b = r.numeric();
    switch (op) {
        case ArithOp::Add: return Value::real(a + b);
        case ArithOp::Sub: return Value::real(a - b);
        case ArithOp::Mul: return Value::real(a * b);
        default: return Value::null();
    }
}

Value eval_mod(const Value& l, const Value& r, const Faults& faults) {
    if (l.is_null() || r.is_null()) return Value::null();
    if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int) {
        int64_t a = l.as_int(), b = r.as_int();
        if (b == 0) throw EngineError(ErrorKind::Domain, "MOD by zero");
        if (a == kInt64Min && b == -1) return Value::integer(0);
        int64_t m = a % b;  // sign of the dividend, and 0 is plain 0, never -0
        if (faults.mod_sign_of_divisor && m != 0 && (m < 0) != (b < 0)) m += b;
        return Value::integer(m);
    }
    double a = l.numeric(), b = r.numeric();
    if (b == 0.0) throw EngineError(ErrorKind::Domain, "MOD by zero");
    double m = std::fmod(a, b);
    if (faults.mod_sign_of_divisor && m != 0.0 && (m < 0.0) != (b < 0.0)) m += b;
    return Value::real(m);
}

// Floats whose value is a whole number come back as INT (FLOOR/CEIL).
Value whole_to_int(double d, const char* what) {
    if (d < -9223372036854775808.0 || d >= 9223372036854775808.0) {
        throw EngineError(ErrorKind::Domain, std::string(what) + " out of 64-bit range");
    }
    return Value::integer(static_cast<int64_t>(d));
}

int64_t position_of(const Value& n) {
    if (n.kind() == ValueKind::Int) return n.as_int();
    return static_cast<int64_t>(n.as_float());
}

}  // namespace

Value kleene_and(const Value& a, const Value& b, const Faults& faults) {
    if (faults.and_null_false_is_null && (a.is_null() || b.is_null())) return Value::null();
    if (is_false(a) || is_false(b)) return Value::boolean(false);
    if (a.is_null() || b.is_null()) return Value::null();
    return Value::boolean(true);
}

Value kleene_or(const Value& a, const Value& b) {
    if (is_true(a) || is_true(b)) return Value::boolean(true);
    if (a.is_null() || b.is_null()) return Value::null();
    return Value::boolean(false);
}

Value kleene_xor(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return Value::null();
    return Value::boolean(a.as_bool() != b.as_bool());
}

Value kleene_not(const Value& a) {
    if (a.is_null()) return Value::null();
    return Value::boolean(!a.as_bool());
}

Value eval_value(const Expr& e, EvalEnv& env) {
    static const Faults kNoFaults{};
    const Faults& faults = env.opts ? env.opts->faults : kNoFaults;
    if (env.opts && env.opts->rule_sink) {
        if (auto rule = rule_for_expr(e)) env.opts->rule_sink->push_back(*rule);
    }
    switch (e.kind) {
        case ExprKind::Literal: return e.lit;
        case ExprKind::Column: return resolve_column(e.name, env);
        case ExprKind::And:
            return kleene_and(eval_bool(*e.kids[0], env), eval_bool(*e.kids[1], env), faults);
        case ExprKind::Or: return kleene_or(eval_bool(*e.kids[0], env), eval_bool(*e.kids[1], env));
        case ExprKind::Xor:
            return kleene_xor(eval_bool(*e.kids[0], env), eval_bool(*e.kids[1], env));
        case ExprKind::Not: return kleene_not(eval_bool(*e.kids[0], env));
        case ExprKind::IsTest: {
            Value b = eval_bool(*e.kids[0], env);
            bool result = false;
            switch (e.is_op) {
                case IsOp::True: result = is_true(b); break;
                case IsOp::False:
                    if (faults.is_false_on_null_is_null && b.is_null()) return Value::null();
                    result = is_false(b);
                    break;
                case IsOp::Unknown:
                case IsOp::Null: result = b.is_null(); break;
            }
            return Value::boolean(e.negated ? !result : result);
        }
        case ExprKind::Compare:
            return eval_compare(e.cmp, eval_num(*e.kids[0], env), eval_num(*e.kids[1], env));
        case ExprKind::Between: {
            Value x = eval_num(*e.kids[0], env);
            Value lo = eval_num(*e.kids[1], env);
            Value hi = eval_num(*e.kids[2], env);
            Value result = kleene_and(eval_compare(CompareOp::Ge, x, lo),
                                      eval_compare(CompareOp::Le, x, hi), faults);
            return e.negated ? kleene_not(result) : result;
        }
        case ExprKind::InList: {
            Value subject = eval_num(*e.kids[0], env);
            bool saw_null = false;
            for (size_t i = 1; i < e.kids.size(); ++i) {
                Value eq = eval_compare(CompareOp::Eq, subject, eval_num(*e.kids[i], env));
                if (is_true(eq)) return Value::boolean(!e.negated);
                if (eq.is_null()) saw_null = true;
            }
            if (saw_null) return Value::null();
            return Value::boolean(e.negated);
        }
        case ExprKind::Exists: {
            BagTable result = execute_subquery(*e.sub, env);
            return Value::boolean(!result.rows.empty());
        }
        case ExprKind::Arith:
            return eval_arith(e.arith, eval_num(*e.kids[0], env), eval_num(*e.kids[1], env));
        case ExprKind::Mod:
            return eval_mod(eval_num(*e.kids[0], env), eval_num(*e.kids[1], env), faults);
        case ExprKind::Power: {
            Value a = eval_num(*e.kids[0], env), b = eval_num(*e.kids[1], env);
            if (a.is_null() || b.is_null()) return Value::null();
            double r = std::pow(a.numeric(), b.numeric());
            if (!std::isfinite(r)) throw EngineError(ErrorKind::Domain, "POWER out of domain");
            return Value::real(r);
        }
        case ExprKind::Length: {
            Value s = eval_str(*e.kids[0], env);
            if (s.is_null()) return Value::null();
            return Value::integer(static_cast<int64_t>(utf8_length(s.as_str())));
        }
        case ExprKind::Abs: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null()) return Value::null();
            if (a.kind() == ValueKind::Int) {
                if (a.as_int() == kInt64Min) {
                    throw EngineError(ErrorKind::Domain, "ABS overflow");
                }
                return Value::integer(a.as_int() < 0 ? -a.as_int() : a.as_int());
            }
            return Value::real(std::fabs(a.as_float()));
        }
        case ExprKind::Ln: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null()) return Value::null();
            if (a.numeric() <= 0.0) throw EngineError(ErrorKind::Domain, "LN of non-positive value");
            return Value::real(std::log(a.numeric()));
        }
        case ExprKind::ExpFn: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null()) return Value::null();
            double r = std::exp(a.numeric());
            if (!std::isfinite(r)) throw EngineError(ErrorKind::Domain, "EXP overflow");
            return Value::real(r);
        }
        case ExprKind::Sqrt: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null()) return Value::null();
            if (a.numeric() < 0.0) {
                throw EngineError(ErrorKind::Domain, "SQRT of negative value");
            }
            return Value::real(std::sqrt(a.numeric()));
        }
        case ExprKind::Floor: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null() || a.kind() == ValueKind::Int) return a;
            return whole_to_int(std::floor(a.as_float()), "FLOOR");
        }
        case ExprKind::Ceil: {
            Value a = eval_num(*e.kids[0], env);
            if (a.is_null() || a.kind() == ValueKind::Int) return a;
            return whole_to_int(std::ceil(a.as_float()), "CEIL");
        }
        case ExprKind::Concat: {
            Value a = eval_str(*e.kids[0], env);
            Value b = eval_str(*e.kids[1], env);
            if (a.is_null() || b.is_null()) return Value::null();
            return Value::text(a.as_str() + b.as_str());
        }
        case ExprKind::Substring: {
            Value s = eval_str(*e.kids[0], env);
            if (s.is_null()) return Value::null();
            Value n = eval_num(*e.kids[1], env);
            if (n.is_null()) return Value::null();
            int64_t pos = position_of(n);
            if (faults.substring_zero_based) pos += 1;
            size_t len = utf8_length(s.as_str());
            if (pos < 1) pos = 1;  // start clamps to the first character
            if (static_cast<size_t>(pos) > len) return Value::text("");
            return Value::text(utf8_substr(s.as_str(), static_cast<size_t>(pos - 1)));
        }
        case ExprKind::Trim: {
            Value s = eval_str(*e.kids[0], env);
            if (s.is_null()) return Value::null();
            const std::string& str = s.as_str();
            if (e.trim_left) {
                size_t b = str.find_first_not_of(' ');
                return Value::text(b == std::string::npos ? "" : str.substr(b));
            }
            size_t last = str.find_last_not_of(' ');
            return Value::text(last == std::string::npos ? "" : str.substr(0, last + 1));
        }
        case ExprKind::Fold: {
            Value s = eval_str(*e.kids[0], env);
            if (s.is_null()) return Value::null();
            std::string out = s.as_str();
            for (char& c : out) {
                if (e.fold_upper && c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
                if (!e.fold_upper && c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
            }
            return Value::text(out);
        }
        case ExprKind::Case: {
            Value cond = eval_bool(*e.kids[0], env);
            // an unknown condition is not true: take the ELSE branch
            if (is_true(cond)) return eval_value(*e.kids[1], env);
            return eval_value(*e.kids[2], env);
        }
        case ExprKind::Cast: {
            Value v = eval_value(*e.kids[0], env);
            switch (e.cast_type) {
                case CastType::String: return cast_to_str(v);
                case CastType::Numeric: return cast_to_num(v);
                case CastType::Boolean: return cast_to_bool(v);
            }
            return Value::null();
        }
        case ExprKind::Subquery: {
            BagTable result = execute_subquery(*e.sub, env);
            if (result.arity() != 1) {
                throw EngineError(ErrorKind::Subquery, "scalar subquery must have one column");
            }
            if (result.rows.empty()) return Value::null();
            if (result.rows.size() > 1) {
                throw EngineError(ErrorKind::Subquery, "scalar subquery returned multiple rows");
            }
            return result.rows[0][0];
        }
    }
    throw EngineError(ErrorKind::Schema, "unhandled expression kind");
}

Value eval_bool(const Expr& e, EvalEnv& env) { return cast_to_bool(eval_value(e, env)); }

Value eval_num(const Expr& e, EvalEnv& env) { return cast_to_num(eval_value(e, env)); }

Value eval_str(const Expr& e, EvalEnv& env) { return cast_to_str(eval_value(e, env)); }

}  // namespace sqlsem
