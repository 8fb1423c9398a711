#include "sqlsem/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <unordered_map>

namespace sqlsem {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Fixture: return "fixture";
        case ErrorKind::UnknownTable: return "unknown-table";
        case ErrorKind::UnknownColumn: return "unknown-column";
        case ErrorKind::AmbiguousColumn: return "ambiguous-column";
        case ErrorKind::Arity: return "arity";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Subquery: return "subquery";
        case ErrorKind::Grammar: return "grammar";
        case ErrorKind::Adapter: return "adapter";
    }
    return "unknown";
}

Value Value::real(double d) {
    if (!std::isfinite(d)) {
        throw EngineError(ErrorKind::Domain, "non-finite float result");
    }
    if (d == 0.0) d = 0.0;  // collapse -0.0
    return Value(d);
}

ValueKind Value::kind() const {
    switch (v_.index()) {
        case 0: return ValueKind::Null;
        case 1: return ValueKind::Bool;
        case 2: return ValueKind::Int;
        case 3: return ValueKind::Float;
        default: return ValueKind::Str;
    }
}

double Value::numeric() const {
    return kind() == ValueKind::Int ? static_cast<double>(as_int()) : as_float();
}

namespace {

// True when a float holds an exactly representable int64. Used so that
// Int(n) and Float(n) are one identity class.
bool float_is_int64(double d, int64_t& out) {
    if (d < -9223372036854775808.0 || d >= 9223372036854775808.0) return false;
    if (d != std::trunc(d)) return false;
    out = static_cast<int64_t>(d);
    return true;
}

}  // namespace

bool value_identical(const Value& a, const Value& b) {
    ValueKind ka = a.kind(), kb = b.kind();
    if (ka == ValueKind::Null || kb == ValueKind::Null) return ka == kb;
    if (ka == ValueKind::Bool || kb == ValueKind::Bool) {
        return ka == kb && a.as_bool() == b.as_bool();
    }
    if (ka == ValueKind::Str || kb == ValueKind::Str) {
        return ka == kb && a.as_str() == b.as_str();
    }
    // numeric vs numeric
    if (ka == ValueKind::Int && kb == ValueKind::Int) return a.as_int() == b.as_int();
    if (ka == ValueKind::Int) {
        int64_t n;
        return float_is_int64(b.as_float(), n) && n == a.as_int();
    }
    if (kb == ValueKind::Int) {
        int64_t n;
        return float_is_int64(a.as_float(), n) && n == b.as_int();
    }
    return a.as_float() == b.as_float();
}

bool row_identical(const Row& a, const Row& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!value_identical(a[i], b[i])) return false;
    }
    return true;
}

std::string value_key(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return "?";
        case ValueKind::Bool: return v.as_bool() ? "b1" : "b0";
        case ValueKind::Int: return "n" + std::to_string(v.as_int());
        case ValueKind::Float: {
            int64_t n;
            if (float_is_int64(v.as_float(), n)) return "n" + std::to_string(n);
            return "n" + num_to_text(v);
        }
        case ValueKind::Str: return "s" + v.as_str();
    }
    return "?";
}

std::string row_key(const Row& r) {
    std::string key;
    for (const Value& v : r) {
        std::string cell = value_key(v);
        key += std::to_string(cell.size());
        key += ':';
        key += cell;
    }
    return key;
}

int value_order(const Value& a, const Value& b) {
    auto rank = [](const Value& v) {
        switch (v.kind()) {
            case ValueKind::Null: return 0;
            case ValueKind::Bool:
            case ValueKind::Int:
            case ValueKind::Float: return 1;
            case ValueKind::Str: return 2;
        }
        return 0;
    };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra == 0) return 0;
    if (ra == 2) {
        int c = a.as_str().compare(b.as_str());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    auto widen = [](const Value& v) -> long double {
        switch (v.kind()) {
            case ValueKind::Bool: return v.as_bool() ? 1.0L : 0.0L;
            case ValueKind::Int: return static_cast<long double>(v.as_int());
            default: return static_cast<long double>(v.as_float());
        }
    };
    long double da = widen(a), db = widen(b);
    if (da < db) return -1;
    if (da > db) return 1;
    return 0;
}

std::string num_to_text(const Value& v) {
    if (v.kind() == ValueKind::Int) return std::to_string(v.as_int());
    double d = v.as_float();
    if (d == std::trunc(d) && std::abs(d) < 1e15) {
        return std::to_string(static_cast<int64_t>(d));
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, ptr);
}

Value text_to_num(const std::string& s) {
    size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    size_t digits_begin = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == digits_begin) return Value::integer(0);  // no numeric prefix
    size_t int_end = i;
    bool fractional = false;
    if (i < s.size() && s[i] == '.' && i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9') {
        fractional = true;
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    if (fractional) {
        std::string prefix = s.substr(0, i);
        return Value::real(std::strtod(prefix.c_str(), nullptr));
    }
    unsigned long long mag = 0;
    for (size_t k = digits_begin; k < int_end; ++k) {
        unsigned digit = static_cast<unsigned>(s[k] - '0');
        if (mag > (18446744073709551615ULL - digit) / 10) {
            throw EngineError(ErrorKind::Domain, "integer literal out of 64-bit range: " + s);
        }
        mag = mag * 10 + digit;
    }
    if (negative) {
        if (mag > 9223372036854775808ULL) {
            throw EngineError(ErrorKind::Domain, "integer literal out of 64-bit range: " + s);
        }
        return Value::integer(mag == 9223372036854775808ULL
                                  ? std::numeric_limits<int64_t>::min()
                                  : -static_cast<int64_t>(mag));
    }
    if (mag > 9223372036854775807ULL) {
        throw EngineError(ErrorKind::Domain, "integer literal out of 64-bit range: " + s);
    }
    return Value::integer(static_cast<int64_t>(mag));
}

Value cast_to_bool(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return Value::null();
        case ValueKind::Bool: return v;
        case ValueKind::Int: return Value::boolean(v.as_int() != 0);
        case ValueKind::Float: return Value::boolean(v.as_float() != 0.0);
        case ValueKind::Str: {
            const std::string& s = v.as_str();
            return Value::boolean(!(s == "0" || s == "false" || s.empty()));
        }
    }
    return Value::null();
}

Value cast_to_num(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return Value::null();
        case ValueKind::Bool: return Value::integer(v.as_bool() ? 1 : 0);
        case ValueKind::Int:
        case ValueKind::Float: return v;
        case ValueKind::Str: return text_to_num(v.as_str());
    }
    return Value::null();
}

Value cast_to_str(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return Value::null();
        case ValueKind::Bool: return Value::text(v.as_bool() ? "1" : "0");
        case ValueKind::Int:
        case ValueKind::Float: return Value::text(num_to_text(v));
        case ValueKind::Str: return v;
    }
    return Value::null();
}

void BagTable::check_invariants() const {
    std::unordered_map<std::string, int> seen;
    for (const std::string& attr : attributes) {
        if (++seen[attr] > 1) {
            throw EngineError(ErrorKind::Schema,
                              "duplicate attribute '" + attr + "' in table '" + name + "'");
        }
    }
    for (const Row& r : rows) {
        if (r.size() != attributes.size()) {
            throw EngineError(ErrorKind::Schema, "row arity mismatch in table '" + name + "'");
        }
    }
}

size_t multiplicity(const BagTable& t, const Row& r) {
    if (!t.rows.empty() && r.size() != t.arity()) {
        throw EngineError(ErrorKind::Arity, "multiplicity probe arity mismatch");
    }
    size_t count = 0;
    for (const Row& row : t.rows) {
        if (row_identical(row, r)) ++count;
    }
    return count;
}

bool tables_multiset_equal(const BagTable& a, const BagTable& b) {
    if (a.arity() != b.arity() || a.rows.size() != b.rows.size()) return false;
    std::unordered_map<std::string, long> counts;
    for (const Row& r : a.rows) counts[row_key(r)]++;
    for (const Row& r : b.rows) {
        if (--counts[row_key(r)] < 0) return false;
    }
    return true;
}

const BagTable& Catalog::table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end()) {
        throw EngineError(ErrorKind::UnknownTable, "unknown table '" + name + "'");
    }
    return it->second;
}

size_t utf8_length(const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string utf8_substr(const std::string& s, size_t from, size_t count) {
    size_t cp = 0, begin = s.size(), end = s.size();
    for (size_t i = 0; i <= s.size(); ++i) {
        bool boundary = i == s.size() || (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80;
        if (!boundary) continue;
        if (cp == from) begin = std::min(begin, i);
        if (count != std::string::npos && cp == from + count) {
            end = i;
            break;
        }
        if (i < s.size()) ++cp;
    }
    if (begin >= end) return "";
    return s.substr(begin, end - begin);
}

}  // namespace sqlsem
