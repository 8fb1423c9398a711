#pragma once

#include <string>

#include "sqlsem/value.hpp"

namespace sqlsem {

/// Parses the line-oriented fixture format:
///
///   TABLE <name> (<attr>[,<attr>]*)
///   ROW <cell>[,<cell>]*
///
/// Cells are NULL, TRUE, FALSE, an integer, a decimal, or a single-quoted
/// string with '' escaping. Blank lines and lines starting with '#' are
/// ignored. Throws EngineError(Fixture) on arity mismatches, duplicate
/// table or attribute names, or unparseable cells.
Catalog parse_fixture(const std::string& text);

Catalog load_fixture_file(const std::string& path);

/// Renders a single value as a fixture cell (inverse of cell parsing).
std::string cell_text(const Value& v);

/// One "ROW a,b,c" line for a result or fixture row.
std::string row_line(const Row& r);

/// Full fixture document for a catalog; parse_fixture round-trips it.
std::string render_fixture(const Catalog& catalog);

}  // namespace sqlsem
