#pragma once

#include <string>
#include <vector>

#include "sqlsem/coverage.hpp"
#include "sqlsem/generator.hpp"
#include "sqlsem/harness.hpp"

namespace sqlsem {

/// Everything a fuzz run needs; serialized as JSON into the output
/// directory so the run can be replayed byte-for-byte.
struct CampaignConfig {
    std::string fixtures_path;
    std::vector<std::string> targets;  // adapter specs; empty means reference-only
    std::string criterion = "composite";
    uint64_t query_budget = 0;   // generation rounds; 0 = unbounded
    double seconds_budget = 0;   // wall clock; 0 = unbounded
    uint64_t seed = 1;
    std::string out_dir;
    std::string join_mode = "paper";  // paper | standard
    bool round_floats = true;
    int workers = 1;
    std::string profile = "full";  // full | core
    size_t initial_pool = 8;

    std::string to_json() const;
    static CampaignConfig from_json(const std::string& text);
};

struct CampaignResult {
    FuzzStats fuzz;
    uint64_t findings_total = 0;
    uint64_t match = 0;
    uint64_t count_mismatch = 0;
    uint64_t content_mismatch = 0;
    uint64_t target_error = 0;
    uint64_t reference_error = 0;
    size_t covered_keywords = 0;
    size_t covered_rules = 0;
    size_t covered_composites = 0;
    std::string corpus_path;
    std::string findings_dir;
    std::string summary;
};

ExecOptions exec_options_for(const CampaignConfig& config);

/// Runs a full campaign: replays fixtures into every target, drives the
/// coverage-guided loop, forwards accepted queries to the harness, and
/// writes corpus, coverage report, findings and a config copy under
/// config.out_dir.
CampaignResult run_campaign(const CampaignConfig& config);

/// Replays a corpus file (accepted-query format) through a fresh ledger.
CoverageLedger replay_corpus(const std::string& corpus_path);

}  // namespace sqlsem
