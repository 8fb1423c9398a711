#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sqlsem/ast.hpp"
#include "sqlsem/exec.hpp"
#include "sqlsem/value.hpp"

namespace sqlsem {

/// A system under test. Adapters replay the fixture catalog into the
/// target and execute query text, returning a rows-of-values grid.
class TargetAdapter {
public:
    virtual ~TargetAdapter() = default;

    virtual std::string name() const = 0;

    /// Creates the catalog's tables and rows in the target, replacing any
    /// previous replay. Throws EngineError(Adapter).
    virtual void replay(const Catalog& catalog) = 0;

    struct RunResult {
        bool ok = false;
        BagTable table;
        std::string error;
    };
    virtual RunResult run(const std::string& sql) = 0;
};

/// In-process reference engine as a target (reference-vs-reference runs,
/// fault-injected mutants).
class RefAdapter : public TargetAdapter {
public:
    explicit RefAdapter(ExecOptions opts = {}, std::string name = "ref");

    std::string name() const override { return name_; }
    void replay(const Catalog& catalog) override { catalog_ = catalog; }
    RunResult run(const std::string& sql) override;

private:
    ExecOptions opts_;
    std::string name_;
    Catalog catalog_;
};

/// Embedded SQLite database (file path or ":memory:").
class SqliteAdapter : public TargetAdapter {
public:
    explicit SqliteAdapter(const std::string& path);
    ~SqliteAdapter() override;

    SqliteAdapter(const SqliteAdapter&) = delete;
    SqliteAdapter& operator=(const SqliteAdapter&) = delete;

    std::string name() const override { return "sqlite"; }
    void replay(const Catalog& catalog) override;
    RunResult run(const std::string& sql) override;

private:
    void* db_ = nullptr;
};

/// Parses "kind:connection" target specs: "ref" or "sqlite:<path>".
std::unique_ptr<TargetAdapter> make_adapter(const std::string& spec);

/// Maps a result into comparison form: booleans become 0/1 integers, and
/// when the query is float-tagged every float cell is rounded
/// half-away-from-zero to two decimals (with -0 canonicalized to 0).
BagTable normalize(const BagTable& result, bool float_tagged);

enum class CompareVerdict { Match, CountMismatch, ContentMismatch, TargetError, ReferenceError };

const char* verdict_name(CompareVerdict v);

struct CompareOutcome {
    CompareVerdict verdict = CompareVerdict::Match;
    std::string detail;
    std::vector<Row> residual_ref;  // rows left after removing identical pairs
    std::vector<Row> residual_tgt;
};

/// Record-count check, then removal of identical pairs under multiset
/// identity. `ordered_key` (column index, or -1) additionally compares
/// the sort-key sequence of ORDER BY queries; an order-only difference is
/// a content mismatch with detail "order".
CompareOutcome compare_tables(const BagTable& ref, const BagTable& tgt, int ordered_key = -1);

struct Finding {
    uint64_t id = 0;
    std::string query;
    std::string fixture;
    CompareVerdict verdict = CompareVerdict::Match;
    std::string target;
    std::vector<std::string> ref_rows;  // fixture-format ROW lines
    std::vector<std::string> tgt_rows;
    uint64_t seed = 0;
    std::string classification = "unclassified";
    std::string detail;
};

/// Executes the query on the reference and each target and emits one
/// finding per target. Errors on either side become verdicts, never
/// crashes; both sides erroring counts as agreement.
std::vector<Finding> run_case(const Query& q, const Catalog& catalog,
                              const std::vector<TargetAdapter*>& targets, const ExecOptions& opts,
                              uint64_t finding_seq_start, uint64_t seed,
                              const std::string& fixture_id, bool round_floats = true);

/// One file per finding plus a MANIFEST; deterministic bytes, idempotent.
std::vector<std::string> persist_findings(const std::vector<Finding>& findings,
                                          const std::string& out_dir);

std::string render_finding(const Finding& f);

}  // namespace sqlsem
