#pragma once

#include <string>
#include <vector>

#include "sqlsem/ast.hpp"

namespace sqlsem {

/// Parse failure with the byte offset of the offending token and the set
/// of token spellings that would have been accepted there.
class SyntaxError : public EngineError {
public:
    SyntaxError(size_t offset, std::vector<std::string> expected, std::string found);

    size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    size_t offset_;
    std::vector<std::string> expected_;
};

/// Parses a single query statement. Keywords are case-insensitive,
/// table/column names case-sensitive. Precedence, loosest to tightest:
/// OR, XOR, AND, NOT, the predicate level (comparisons, IS tests, BETWEEN,
/// IN; left-associative), ||, + -, * /. A leading sign on a numeric
/// literal is folded into the literal.
QueryPtr parse(const std::string& text);

/// Parses a bare value expression (used by tests and the eval CLI path).
ExprPtr parse_expression(const std::string& text);

}  // namespace sqlsem
