#include "sqlsem/fixture.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace sqlsem {

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& what) {
    throw EngineError(ErrorKind::Fixture, "fixture line " + std::to_string(line_no) + ": " + what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits on commas that are not inside a quoted string.
std::vector<std::string> split_cells(const std::string& s, size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_str) {
            cur += c;
            if (c == '\'') {
                if (i + 1 < s.size() && s[i + 1] == '\'') {
                    cur += s[++i];
                } else {
                    in_str = false;
                }
            }
            continue;
        }
        if (c == '\'') {
            in_str = true;
            cur += c;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_str) fail(line_no, "unterminated string literal");
    out.push_back(trim(cur));
    return out;
}

Value parse_cell(const std::string& cell, size_t line_no) {
    if (cell.empty()) fail(line_no, "empty cell");
    if (cell == "NULL") return Value::null();
    if (cell == "TRUE") return Value::boolean(true);
    if (cell == "FALSE") return Value::boolean(false);
    if (cell.front() == '\'') {
        if (cell.size() < 2 || cell.back() != '\'') fail(line_no, "malformed string cell " + cell);
        std::string body = cell.substr(1, cell.size() - 2);
        std::string out;
        for (size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '\'') {
                if (i + 1 >= body.size() || body[i + 1] != '\'') {
                    fail(line_no, "stray quote in string cell " + cell);
                }
                out += '\'';
                ++i;
            } else {
                out += body[i];
            }
        }
        return Value::text(out);
    }
    // numeric: the whole cell must be consumed by the numeric grammar
    size_t i = 0;
    if (cell[i] == '+' || cell[i] == '-') ++i;
    size_t digits = 0;
    while (i < cell.size() && cell[i] >= '0' && cell[i] <= '9') ++i, ++digits;
    bool fractional = false;
    if (i < cell.size() && cell[i] == '.') {
        ++i;
        size_t frac = 0;
        while (i < cell.size() && cell[i] >= '0' && cell[i] <= '9') ++i, ++frac;
        if (frac == 0) fail(line_no, "malformed decimal cell " + cell);
        fractional = true;
    }
    if (digits == 0 && !fractional) fail(line_no, "unparseable cell " + cell);
    if (i != cell.size()) fail(line_no, "trailing characters in cell " + cell);
    try {
        if (fractional) return Value::real(std::strtod(cell.c_str(), nullptr));
        return text_to_num(cell);
    } catch (const EngineError& e) {
        fail(line_no, e.what());
    }
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

}  // namespace

Catalog parse_fixture(const std::string& text) {
    Catalog catalog;
    BagTable* current = nullptr;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("TABLE ", 0) == 0) {
            size_t open = t.find('(');
            size_t close = t.rfind(')');
            if (open == std::string::npos || close == std::string::npos || close < open) {
                fail(line_no, "malformed TABLE declaration");
            }
            std::string name = trim(t.substr(6, open - 6));
            if (!valid_name(name)) fail(line_no, "bad table name '" + name + "'");
            if (catalog.has(name)) fail(line_no, "duplicate table '" + name + "'");
            BagTable table;
            table.name = name;
            for (const std::string& attr : split_cells(t.substr(open + 1, close - open - 1), line_no)) {
                if (!valid_name(attr)) fail(line_no, "bad attribute name '" + attr + "'");
                for (const std::string& prev : table.attributes) {
                    if (prev == attr) fail(line_no, "duplicate attribute '" + attr + "'");
                }
                table.attributes.push_back(attr);
            }
            if (table.attributes.empty()) fail(line_no, "table without attributes");
            catalog.tables.emplace(name, std::move(table));
            current = &catalog.tables.at(name);
        } else if (t.rfind("ROW", 0) == 0 && (t.size() == 3 || t[3] == ' ')) {
            if (!current) fail(line_no, "ROW before any TABLE");
            Row row;
            for (const std::string& cell : split_cells(t.size() > 4 ? t.substr(4) : "", line_no)) {
                row.push_back(parse_cell(cell, line_no));
            }
            if (row.size() != current->arity()) {
                fail(line_no, "row arity " + std::to_string(row.size()) + " does not match table '" +
                                  current->name + "' arity " + std::to_string(current->arity()));
            }
            current->rows.push_back(std::move(row));
        } else {
            fail(line_no, "unrecognized directive: " + t);
        }
    }
    return catalog;
}

Catalog load_fixture_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EngineError(ErrorKind::Fixture, "cannot open fixture file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_fixture(buf.str());
}

std::string cell_text(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return "NULL";
        case ValueKind::Bool: return v.as_bool() ? "TRUE" : "FALSE";
        case ValueKind::Int:
        case ValueKind::Float: return num_to_text(v);
        case ValueKind::Str: {
            std::string out = "'";
            for (char c : v.as_str()) {
                out += c;
                if (c == '\'') out += '\'';
            }
            out += '\'';
            return out;
        }
    }
    return "NULL";
}

std::string row_line(const Row& r) {
    std::string line = "ROW ";
    for (size_t i = 0; i < r.size(); ++i) {
        if (i) line += ',';
        line += cell_text(r[i]);
    }
    return line;
}

std::string render_fixture(const Catalog& catalog) {
    std::string out;
    for (const auto& [name, table] : catalog.tables) {
        out += "TABLE " + name + " (";
        for (size_t i = 0; i < table.attributes.size(); ++i) {
            if (i) out += ',';
            out += table.attributes[i];
        }
        out += ")\n";
        for (const Row& r : table.rows) {
            out += row_line(r);
            out += '\n';
        }
    }
    return out;
}

}  // namespace sqlsem
