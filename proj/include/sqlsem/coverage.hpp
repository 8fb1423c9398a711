#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sqlsem/ast.hpp"

namespace sqlsem {

// Rule ids are "<KEYWORD>/<variant>" strings, where the variant is the
// input-shape the keyword received (mirroring how clause dispatch picks a
// rule): operand classes lit/col/exp for operators, star/columns/constant/
// null for SELECT, and so on.

/// The fixed keyword universe of this build, in registry order.
const std::vector<std::string>& keyword_universe();

/// The fixed rule universe: every (keyword, variant) pair this build's
/// semantics can dispatch.
const std::vector<std::string>& rule_universe();

size_t total_keywords();
size_t total_rules();

/// Static shape classification of one expression node; absent for nodes
/// that are not keywords (literals, columns, scalar subqueries).
std::optional<std::string> rule_for_expr(const Expr& e);

/// The SELECT rule a select body dispatches (star / columns / constant /
/// null), and the modifier slot's rule ("" when no modifier).
std::string select_rule_of(const SelectCore& core);
std::string modifier_rule_of(const SelectCore& core);

/// Every rule the query triggers, determined statically from AST shape
/// (clause rules plus one rule per operator node, recursing into
/// subqueries). May contain duplicates.
std::vector<std::string> rules_of(const Query& q);

/// The ordered rule-id sequence along the query's derivation path: clause
/// rules in canonical order with each condition contributing its
/// top-level operator, EXISTS and condition-position subqueries expanding
/// up to the model's query-level cap. Deterministic; equal ASTs yield
/// equal signatures.
std::string composite_signature(const Query& q);

/// Query-level cap shared by the composite signature, the grammar model
/// and the generator (a query at the deepest level contains no further
/// subqueries or set operations).
constexpr int kCompositeQueryLevels = 2;

// ---- Algorithm: counting composite rules over a grammar model ----

/// A node of an explicit grammar model. Non-terminal keyword nodes carry
/// the keyword's rule count; terminal leaves end a derivation path.
struct GrammarNode {
    bool terminal = false;
    bool is_keyword = false;
    uint64_t rule_count = 1;
    std::string label;
    std::vector<std::shared_ptr<GrammarNode>> children;
};
using GrammarNodePtr = std::shared_ptr<GrammarNode>;

GrammarNodePtr grammar_leaf(std::string label = "leaf");
GrammarNodePtr grammar_keyword(std::string label, uint64_t rule_count,
                               std::vector<GrammarNodePtr> children);
GrammarNodePtr grammar_group(std::string label, std::vector<GrammarNodePtr> children);

using CompositeCount = unsigned __int128;

std::string composite_count_text(CompositeCount n);

/// Depth-first traversal of the grammar: every terminal leaf contributes
/// the product of the rule counts of the keyword nodes on its root path;
/// the result is the sum over all leaves. Throws EngineError(Grammar) if
/// the model shares nodes cyclically.
CompositeCount count_composite_rules(const GrammarNode& root);

/// The composite-rule total of this build's SQL grammar model (clause
/// skeleton, top-operator condition slots, subquery and set-operation
/// recursion cut at kCompositeQueryLevels). Computed once, arithmetic is
/// exact in 128 bits.
CompositeCount sql_composite_total();

// ---- Ledger ----

struct RecordOutcome {
    bool keyword_grew = false;
    bool rule_grew = false;
    bool composite_grew = false;

    bool grew(const std::string& criterion) const;
};

/// Coverage accounting for the three criteria. Covered sets only grow.
class CoverageLedger {
public:
    RecordOutcome record(const Query& q);

    /// What record(q) would report, without inserting anything.
    RecordOutcome peek(const Query& q) const;

    size_t covered_keywords() const { return keywords_.size(); }
    size_t covered_rules() const { return rules_.size(); }
    size_t covered_composites() const { return composites_.size(); }

    double keyword_ratio() const;
    double rule_ratio() const;
    double composite_ratio() const;

    const std::map<std::string, uint64_t>& keyword_counts() const { return keyword_counts_; }

    /// Human-readable table plus machine lines
    /// `COV <criterion> <covered> <total> <ratio>`.
    std::string report() const;

private:
    std::set<std::string> keywords_;
    std::set<std::string> rules_;
    std::set<std::string> composites_;
    std::map<std::string, uint64_t> keyword_counts_;  // queries containing the keyword
};

}  // namespace sqlsem
