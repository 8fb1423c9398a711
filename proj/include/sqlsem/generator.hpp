#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sqlsem/ast.hpp"
#include "sqlsem/coverage.hpp"
#include "sqlsem/value.hpp"

namespace sqlsem {

/// Deterministic random source. All draws go through explicit helpers so
/// that a fixed seed replays the exact same query sequence on any build.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }
    size_t below(size_t n) { return n == 0 ? 0 : static_cast<size_t>(next() % n); }
    bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }
    int64_t int_range(int64_t lo, int64_t hi) {  // inclusive
        return lo + static_cast<int64_t>(below(static_cast<size_t>(hi - lo + 1)));
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 eng_;
};

/// Full exercises the whole grammar; Core is the conservative dialect
/// subset used for live-target smoke campaigns (no join-mode divergence
/// features, no string comparisons, no division).
enum class GenProfile { Full, Core };

/// One random grammar-directed query referencing only catalog tables and
/// columns. Every grammar production is reachable with nonzero
/// probability under the Full profile.
QueryPtr generate_query(const Catalog& catalog, Rng& rng, GenProfile profile = GenProfile::Full);

struct MutationRule {
    int id;            // 01..13
    const char* level; // keyword | rule | subquery
    const char* name;
};

const std::vector<MutationRule>& mutation_rules();

/// Applies one mutation rule at a randomly chosen applicable site of a
/// copy of `q`. Returns nullopt when the rule has no applicable site or
/// the mutant fails validation.
std::optional<QueryPtr> mutate(const Query& q, int rule_id, const Catalog& catalog, Rng& rng,
                               GenProfile profile = GenProfile::Full);

struct Verdict {
    bool ok = true;
    std::string reason;
};

/// Syntactic and semantic validity: the printed text re-parses to an
/// equal tree, all table/column references resolve, clause shapes hold
/// (HAVING needs GROUP BY, aggregates take a single projected column).
Verdict validate(const Query& q, const Catalog& catalog);

struct PooledQuery {
    QueryPtr query;
    uint64_t id = 0;
    int source_rule = 0;  // 0 for initial seeds
    uint64_t parent = 0;
};

class SeedPool {
public:
    void add(QueryPtr q, int source_rule, uint64_t parent);
    const PooledQuery& pick(Rng& rng) const;
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<PooledQuery>& entries() const { return entries_; }

private:
    std::vector<PooledQuery> entries_;
    uint64_t next_id_ = 1;
};

/// Pool of `n` initial grammar-directed queries (bounded retries per
/// slot; slots that never validate are skipped).
SeedPool generate_initial(const Catalog& catalog, size_t n, Rng& rng,
                          GenProfile profile = GenProfile::Full,
                          const std::function<bool(const Query&)>& runtime_screen = {});

struct FuzzBudget {
    uint64_t rounds = 0;    // 0 = unbounded
    double seconds = 0.0;   // 0 = unbounded
};

struct AcceptedQuery {
    QueryPtr query;
    uint64_t sequence;   // 1-based acceptance index
    int rule_id;         // mutation rule, 0 for fresh seeds
    uint64_t parent_id;  // pool id of the seed, 0 for fresh
};

struct FuzzStats {
    uint64_t rounds = 0;
    uint64_t accepted = 0;
    uint64_t rejected_invalid = 0;
    uint64_t rejected_no_gain = 0;
    uint64_t rejected_runtime = 0;
    uint64_t fallback_seeds = 0;
};

/// Coverage-guided loop: draw a seed, mutate until the chosen criterion's
/// coverage grows (bounded by a stagnation cap, then fall back to a fresh
/// seed), record and forward each accepted query, stop on budget.
/// criterion is "keyword", "rule" or "composite". When `guided` is false
/// every valid query is accepted (the random baseline).
FuzzStats fuzz_loop(const Catalog& catalog, CoverageLedger& ledger, const std::string& criterion,
                    FuzzBudget budget, Rng& rng, SeedPool& pool,
                    const std::function<void(const AcceptedQuery&)>& sink,
                    const std::function<bool(const Query&)>& runtime_screen,
                    GenProfile profile = GenProfile::Full, bool guided = true);

/// Inner-loop stagnation cap before falling back to a fresh seed.
constexpr int kStagnationCap = 500;

/// True when the query can produce floating-point cells (division,
/// transcendental functions, AVG, float literals); the harness rounds
/// such results to two decimals on both sides before comparing.
bool produces_floats(const Query& q);

}  // namespace sqlsem
