#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sqlsem {

enum class ErrorKind {
    Syntax,
    Fixture,
    UnknownTable,
    UnknownColumn,
    AmbiguousColumn,
    Arity,
    Schema,
    Domain,
    Subquery,
    Grammar,
    Adapter,
};

/// Every failure the engine can signal. `kind` drives exit codes and
/// finding classification; the message is for humans.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

enum class ValueKind { Null, Bool, Int, Float, Str };

/// A tagged SQL scalar. NULL is its own state, distinct from false and 0.
/// Float payloads are always finite; construction rejects NaN/Inf and
/// canonicalizes -0.0 to 0.0 so no operation can ever surface "-0".
class Value {
public:
    Value() : v_(std::monostate{}) {}

    static Value null() { return Value(); }
    static Value boolean(bool b) { return Value(b); }
    static Value integer(int64_t i) { return Value(i); }
    static Value real(double d);
    static Value text(std::string s) { return Value(std::move(s)); }

    ValueKind kind() const;
    bool is_null() const { return kind() == ValueKind::Null; }
    bool is_numeric() const { return kind() == ValueKind::Int || kind() == ValueKind::Float; }

    bool as_bool() const { return std::get<bool>(v_); }
    int64_t as_int() const { return std::get<int64_t>(v_); }
    double as_float() const { return std::get<double>(v_); }
    const std::string& as_str() const { return std::get<std::string>(v_); }

    /// Numeric payload widened to double. Pre: is_numeric().
    double numeric() const;

private:
    explicit Value(bool b) : v_(b) {}
    explicit Value(int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(std::string s) : v_(std::move(s)) {}

    std::variant<std::monostate, bool, int64_t, double, std::string> v_;
};

using Row = std::vector<Value>;

/// Multiset identity: the decidable equivalence used for multiplicities,
/// DISTINCT, set operations and grouping. NULL equals NULL here; integers
/// and floats compare by numeric value; this is NOT the three-valued SQL
/// comparison (which lives in the evaluator).
bool value_identical(const Value& a, const Value& b);
bool row_identical(const Row& a, const Row& b);

/// Canonical hash key under multiset identity (identical values share a key).
std::string value_key(const Value& v);
std::string row_key(const Row& r);

/// Total order used by ORDER BY and MAX/MIN tie resolution:
/// NULL, then the numeric class (booleans as 0/1), then strings bytewise.
/// Returns <0, 0, >0.
int value_order(const Value& a, const Value& b);

/// num2str: canonical text of a number. Integers render without a decimal
/// point; floats render as the shortest decimal that round-trips, with a
/// whole-valued float rendering like an integer.
std::string num_to_text(const Value& v);

/// str2num: maximal leading numeric prefix (optional sign, digits, optional
/// fraction). A pure-integer prefix yields Int, a fractional one Float, and
/// no prefix at all yields Int(0) -- so 'hhhh' becomes 0.
Value text_to_num(const std::string& s);

// Implicit casts (rules shared by the evaluator and CAST). All three are
// total and map NULL to NULL.
Value cast_to_bool(const Value& v);
Value cast_to_num(const Value& v);
Value cast_to_str(const Value& v);

/// A named bag of rows. Row order is preserved by every operation but is
/// only semantically meaningful after ORDER BY.
struct BagTable {
    std::string name;                     // empty for derived tables
    std::vector<std::string> attributes;  // unique within the table
    std::vector<Row> rows;

    size_t arity() const { return attributes.size(); }

    void check_invariants() const;  // throws EngineError(Schema)
};

/// Number of rows of `t` identical to `r` under multiset identity.
size_t multiplicity(const BagTable& t, const Row& r);

bool tables_multiset_equal(const BagTable& a, const BagTable& b);

struct Catalog {
    std::map<std::string, BagTable> tables;

    const BagTable& table(const std::string& name) const;
    bool has(const std::string& name) const { return tables.count(name) != 0; }
};

/// Count of Unicode code points in a UTF-8 string.
size_t utf8_length(const std::string& s);

/// Code-point slice [from, from+count) of a UTF-8 string; `count` == npos
/// means through the end.
std::string utf8_substr(const std::string& s, size_t from, size_t count = std::string::npos);

}  // namespace sqlsem
