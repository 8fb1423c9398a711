#include "sqlsem/harness.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "sqlsem/fixture.hpp"
#include "sqlsem/generator.hpp"
#include "sqlsem/parser.hpp"
#include "sqlsem/printer.hpp"

namespace sqlsem {

RefAdapter::RefAdapter(ExecOptions opts, std::string name)
    : opts_(std::move(opts)), name_(std::move(name)) {}

TargetAdapter::RunResult RefAdapter::run(const std::string& sql) {
    RunResult out;
    try {
        QueryPtr q = parse(sql);
        out.table = execute(*q, catalog_, opts_);
        out.ok = true;
    } catch (const EngineError& e) {
        out.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
    return out;
}

namespace {

sqlite3* handle(void* p) { return static_cast<sqlite3*>(p); }

[[noreturn]] void adapter_fail(sqlite3* db, const std::string& what) {
    throw EngineError(ErrorKind::Adapter, what + ": " + sqlite3_errmsg(db));
}

std::string sql_string_literal(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out += c;
        if (c == '\'') out += '\'';
    }
    out += '\'';
    return out;
}

}  // namespace

SqliteAdapter::SqliteAdapter(const std::string& path) {
    sqlite3* db = nullptr;
    if (sqlite3_open(path.c_str(), &db) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
        sqlite3_close(db);
        throw EngineError(ErrorKind::Adapter, "cannot open sqlite database: " + msg);
    }
    db_ = db;
}

SqliteAdapter::~SqliteAdapter() {
    if (db_) sqlite3_close(handle(db_));
}

void SqliteAdapter::replay(const Catalog& catalog) {
    sqlite3* db = handle(db_);
    char* err = nullptr;
    // drop anything from a previous replay
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, "SELECT name FROM sqlite_master WHERE type='table'", -1, &stmt,
                           nullptr) != SQLITE_OK) {
        adapter_fail(db, "cannot list tables");
    }
    std::vector<std::string> existing;
    while (sqlite3_step(stmt) == SQLITE_ROW) {
        existing.push_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt, 0)));
    }
    sqlite3_finalize(stmt);
    for (const std::string& name : existing) {
        std::string drop = "DROP TABLE \"" + name + "\"";
        if (sqlite3_exec(db, drop.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "";
            sqlite3_free(err);
            throw EngineError(ErrorKind::Adapter, "drop failed: " + msg);
        }
    }
    for (const auto& [name, table] : catalog.tables) {
        std::string create = "CREATE TABLE \"" + name + "\" (";
        for (size_t i = 0; i < table.attributes.size(); ++i) {
            if (i) create += ", ";
            create += "\"" + table.attributes[i] + "\"";
        }
        create += ")";
        if (sqlite3_exec(db, create.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "";
            sqlite3_free(err);
            throw EngineError(ErrorKind::Adapter, "create failed: " + msg);
        }
        for (const Row& row : table.rows) {
            std::string insert = "INSERT INTO \"" + name + "\" VALUES (";
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) insert += ", ";
                switch (row[i].kind()) {
                    case ValueKind::Null: insert += "NULL"; break;
                    case ValueKind::Bool: insert += row[i].as_bool() ? "1" : "0"; break;
                    case ValueKind::Int:
                    case ValueKind::Float: insert += num_to_text(row[i]); break;
                    case ValueKind::Str: insert += sql_string_literal(row[i].as_str()); break;
                }
            }
            insert += ")";
            if (sqlite3_exec(db, insert.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
                std::string msg = err ? err : "";
                sqlite3_free(err);
                throw EngineError(ErrorKind::Adapter, "insert failed: " + msg);
            }
        }
    }
}

TargetAdapter::RunResult SqliteAdapter::run(const std::string& sql) {
    sqlite3* db = handle(db_);
    RunResult out;
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        out.error = sqlite3_errmsg(db);
        return out;
    }
    int cols = sqlite3_column_count(stmt);
    for (int c = 0; c < cols; ++c) {
        const char* name = sqlite3_column_name(stmt, c);
        out.table.attributes.push_back(name ? name : "c" + std::to_string(c));
    }
    while (true) {
        int rc = sqlite3_step(stmt);
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW) {
            out.error = sqlite3_errmsg(db);
            sqlite3_finalize(stmt);
            return out;
        }
        Row row;
        for (int c = 0; c < cols; ++c) {
            switch (sqlite3_column_type(stmt, c)) {
                case SQLITE_NULL: row.push_back(Value::null()); break;
                case SQLITE_INTEGER: row.push_back(Value::integer(sqlite3_column_int64(stmt, c))); break;
                case SQLITE_FLOAT: {
                    double d = sqlite3_column_double(stmt, c);
                    if (!std::isfinite(d)) {
                        out.error = "unmappable non-finite float from target";
                        sqlite3_finalize(stmt);
                        return out;
                    }
                    row.push_back(Value::real(d));
                    break;
                }
                case SQLITE_TEXT: {
                    const unsigned char* s = sqlite3_column_text(stmt, c);
                    row.push_back(Value::text(s ? reinterpret_cast<const char*>(s) : ""));
                    break;
                }
                default:
                    out.error = "unmappable value type from target";
                    sqlite3_finalize(stmt);
                    return out;
            }
        }
        out.table.rows.push_back(std::move(row));
    }
    sqlite3_finalize(stmt);
    out.ok = true;
    return out;
}

std::unique_ptr<TargetAdapter> make_adapter(const std::string& spec) {
    if (spec == "ref") return std::make_unique<RefAdapter>();
    if (spec.rfind("sqlite:", 0) == 0) {
        return std::make_unique<SqliteAdapter>(spec.substr(7));
    }
    if (spec == "sqlite") return std::make_unique<SqliteAdapter>(":memory:");
    throw EngineError(ErrorKind::Adapter, "unknown target spec '" + spec + "'");
}

BagTable normalize(const BagTable& result, bool float_tagged) {
    BagTable out;
    out.name = result.name;
    out.attributes = result.attributes;
    for (const Row& row : result.rows) {
        Row r;
        r.reserve(row.size());
        for (const Value& v : row) {
            switch (v.kind()) {
                case ValueKind::Bool: r.push_back(Value::integer(v.as_bool() ? 1 : 0)); break;
                case ValueKind::Float:
                    if (float_tagged) {
                        double rounded = std::round(v.as_float() * 100.0) / 100.0;
                        r.push_back(Value::real(rounded));  // real() collapses -0
                    } else {
                        r.push_back(v);
                    }
                    break;
                default: r.push_back(v); break;
            }
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

const char* verdict_name(CompareVerdict v) {
    switch (v) {
        case CompareVerdict::Match: return "match";
        case CompareVerdict::CountMismatch: return "count-mismatch";
        case CompareVerdict::ContentMismatch: return "content-mismatch";
        case CompareVerdict::TargetError: return "target-error";
        case CompareVerdict::ReferenceError: return "reference-error";
    }
    return "match";
}

CompareOutcome compare_tables(const BagTable& ref, const BagTable& tgt, int ordered_key) {
    CompareOutcome out;
    if (ref.rows.size() != tgt.rows.size()) {
        out.verdict = CompareVerdict::CountMismatch;
        out.detail = "reference " + std::to_string(ref.rows.size()) + " rows, target " +
                     std::to_string(tgt.rows.size());
        out.residual_ref = ref.rows;
        out.residual_tgt = tgt.rows;
        return out;
    }
    // remove identical data pairs
    std::unordered_map<std::string, long> counts;
    for (const Row& r : ref.rows) counts[row_key(r)]++;
    for (const Row& r : tgt.rows) {
        if (--counts[row_key(r)] < 0) out.residual_tgt.push_back(r);
    }
    for (const Row& r : ref.rows) {
        if (counts[row_key(r)]-- > 0) out.residual_ref.push_back(r);
    }
    if (!out.residual_ref.empty() || !out.residual_tgt.empty()) {
        out.verdict = CompareVerdict::ContentMismatch;
        out.detail = "residual rows after pair removal";
        return out;
    }
    if (ordered_key >= 0 && static_cast<size_t>(ordered_key) < ref.arity() &&
        static_cast<size_t>(ordered_key) < tgt.arity()) {
        for (size_t i = 0; i < ref.rows.size(); ++i) {
            const Value& a = ref.rows[i][static_cast<size_t>(ordered_key)];
            const Value& b = tgt.rows[i][static_cast<size_t>(ordered_key)];
            if (!value_identical(a, b)) {
                out.verdict = CompareVerdict::ContentMismatch;
                out.detail = "order";
                out.residual_ref = ref.rows;
                out.residual_tgt = tgt.rows;
                return out;
            }
        }
    }
    out.verdict = CompareVerdict::Match;
    return out;
}

namespace {

// Index of the ORDER BY key within the final output schema, -1 when the
// query carries no ORDER BY (or the key cannot be located).
int ordered_key_index(const Query& q, const BagTable& ref_result) {
    if (!q.order_by) return -1;
    try {
        return resolve_in_attrs(q.order_by->column, ref_result.attributes, ref_result.name);
    } catch (const EngineError&) {
        return -1;
    }
}

std::vector<std::string> table_row_lines(const BagTable& t) {
    std::vector<std::string> out;
    out.reserve(t.rows.size());
    for (const Row& r : t.rows) out.push_back(row_line(r));
    return out;
}

}  // namespace

std::vector<Finding> run_case(const Query& q, const Catalog& catalog,
                              const std::vector<TargetAdapter*>& targets, const ExecOptions& opts,
                              uint64_t finding_seq_start, uint64_t seed,
                              const std::string& fixture_id, bool round_floats) {
    std::string sql = print(q);
    bool float_tagged = round_floats && produces_floats(q);

    bool ref_ok = false;
    BagTable ref_result;
    std::string ref_error;
    try {
        ref_result = execute(q, catalog, opts);
        ref_ok = true;
    } catch (const EngineError& e) {
        ref_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
    BagTable ref_norm = ref_ok ? normalize(ref_result, float_tagged) : BagTable{};

    std::vector<Finding> findings;
    uint64_t id = finding_seq_start;
    for (TargetAdapter* target : targets) {
        Finding f;
        f.id = id++;
        f.query = sql;
        f.fixture = fixture_id;
        f.target = target->name();
        f.seed = seed;

        TargetAdapter::RunResult run = target->run(sql);
        if (!ref_ok && !run.ok) {
            f.verdict = CompareVerdict::Match;  // both sides reject the query
            f.detail = "both error: reference(" + ref_error + ") target(" + run.error + ")";
        } else if (!ref_ok) {
            f.verdict = CompareVerdict::ReferenceError;
            f.detail = ref_error;
            f.tgt_rows = table_row_lines(normalize(run.table, float_tagged));
        } else if (!run.ok) {
            f.verdict = CompareVerdict::TargetError;
            f.detail = run.error;
            f.ref_rows = table_row_lines(ref_norm);
        } else {
            BagTable tgt_norm = normalize(run.table, float_tagged);
            CompareOutcome cmp =
                compare_tables(ref_norm, tgt_norm, ordered_key_index(q, ref_result));
            f.verdict = cmp.verdict;
            f.detail = cmp.detail;
            f.ref_rows = table_row_lines(ref_norm);
            f.tgt_rows = table_row_lines(tgt_norm);
        }
        findings.push_back(std::move(f));
    }
    return findings;
}

std::string render_finding(const Finding& f) {
    char head[64];
    std::snprintf(head, sizeof(head), "%06llu", static_cast<unsigned long long>(f.id));
    std::string out;
    out += "id: " + std::string(head) + "\n";
    out += "query: " + f.query + "\n";
    out += "fixture: " + f.fixture + "\n";
    out += "verdict: " + std::string(verdict_name(f.verdict)) + "\n";
    out += "target: " + f.target + "\n";
    out += "seed: " + std::to_string(f.seed) + "\n";
    out += "classification: " + f.classification + "\n";
    if (!f.detail.empty()) out += "detail: " + f.detail + "\n";
    out += "ref_rows:\n";
    for (const std::string& line : f.ref_rows) out += line + "\n";
    out += "tgt_rows:\n";
    for (const std::string& line : f.tgt_rows) out += line + "\n";
    return out;
}

std::vector<std::string> persist_findings(const std::vector<Finding>& findings,
                                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> paths;
    std::vector<const Finding*> sorted;
    for (const Finding& f : findings) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const Finding* a, const Finding* b) { return a->id < b->id; });

    std::string manifest;
    for (const Finding* f : sorted) {
        char name[64];
        std::snprintf(name, sizeof(name), "%06llu.finding", static_cast<unsigned long long>(f->id));
        fs::path path = fs::path(out_dir) / name;
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) throw EngineError(ErrorKind::Adapter, "cannot write " + path.string());
        file << render_finding(*f);
        paths.push_back(path.string());
        char idtext[16];
        std::snprintf(idtext, sizeof(idtext), "%06llu", static_cast<unsigned long long>(f->id));
        manifest += "FINDING " + std::string(idtext) + " " + verdict_name(f->verdict) + " " +
                    f->target + "\n";
    }
    fs::path manifest_path = fs::path(out_dir) / "MANIFEST";
    std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
    if (!mf) throw EngineError(ErrorKind::Adapter, "cannot write " + manifest_path.string());
    mf << manifest;
    paths.push_back(manifest_path.string());
    return paths;
}

}  // namespace sqlsem
