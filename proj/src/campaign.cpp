#include "sqlsem/campaign.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "sqlsem/fixture.hpp"
#include "sqlsem/parser.hpp"
#include "sqlsem/printer.hpp"

namespace sqlsem {

namespace fs = std::filesystem;
using nlohmann::json;

std::string CampaignConfig::to_json() const {
    json j;
    j["fixtures"] = fixtures_path;
    j["targets"] = targets;
    j["criterion"] = criterion;
    j["query_budget"] = query_budget;
    j["seconds_budget"] = seconds_budget;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["join_mode"] = join_mode;
    j["round_floats"] = round_floats;
    j["workers"] = workers;
    j["profile"] = profile;
    j["initial_pool"] = initial_pool;
    return j.dump(2) + "\n";
}

CampaignConfig CampaignConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    CampaignConfig c;
    c.fixtures_path = j.value("fixtures", "");
    c.targets = j.value("targets", std::vector<std::string>{});
    c.criterion = j.value("criterion", "composite");
    c.query_budget = j.value("query_budget", uint64_t{0});
    c.seconds_budget = j.value("seconds_budget", 0.0);
    c.seed = j.value("seed", uint64_t{1});
    c.out_dir = j.value("out_dir", "");
    c.join_mode = j.value("join_mode", "paper");
    c.round_floats = j.value("round_floats", true);
    c.workers = j.value("workers", 1);
    c.profile = j.value("profile", "full");
    c.initial_pool = j.value("initial_pool", size_t{8});
    return c;
}

ExecOptions exec_options_for(const CampaignConfig& config) {
    ExecOptions opts;
    opts.join_mode = config.join_mode == "standard" ? JoinMode::Standard : JoinMode::Paper;
    return opts;
}

namespace {

GenProfile profile_for(const CampaignConfig& config) {
    return config.profile == "core" ? GenProfile::Core : GenProfile::Full;
}

void tally(CampaignResult& result, CompareVerdict v) {
    switch (v) {
        case CompareVerdict::Match: ++result.match; break;
        case CompareVerdict::CountMismatch: ++result.count_mismatch; break;
        case CompareVerdict::ContentMismatch: ++result.content_mismatch; break;
        case CompareVerdict::TargetError: ++result.target_error; break;
        case CompareVerdict::ReferenceError: ++result.reference_error; break;
    }
}

// Per-lane adapter set. Lanes never share a connection; file-backed
// sqlite specs get a lane suffix so replays do not collide.
std::vector<std::unique_ptr<TargetAdapter>> build_lane(const CampaignConfig& config,
                                                       const ExecOptions& opts,
                                                       const Catalog& catalog, int lane,
                                                       int lanes) {
    std::vector<std::unique_ptr<TargetAdapter>> out;
    for (const std::string& spec : config.targets) {
        std::unique_ptr<TargetAdapter> adapter;
        if (spec == "ref") {
            adapter = std::make_unique<RefAdapter>(opts);
        } else if (spec.rfind("sqlite:", 0) == 0 && lanes > 1 && spec != "sqlite::memory:") {
            adapter = make_adapter(spec + ".lane" + std::to_string(lane));
        } else {
            adapter = make_adapter(spec);
        }
        adapter->replay(catalog);
        out.push_back(std::move(adapter));
    }
    return out;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
    Catalog catalog = load_fixture_file(config.fixtures_path);
    ExecOptions opts = exec_options_for(config);
    GenProfile profile = profile_for(config);

    fs::create_directories(config.out_dir);
    {
        std::ofstream cfg(fs::path(config.out_dir) / "config.json",
                          std::ios::binary | std::ios::trunc);
        cfg << config.to_json();
    }

    CoverageLedger ledger;
    Rng rng(config.seed);
    auto runtime_screen = [&](const Query& q) {
        try {
            execute(q, catalog, opts);
            return true;
        } catch (const EngineError&) {
            return false;
        }
    };
    SeedPool pool = generate_initial(catalog, config.initial_pool, rng, profile, runtime_screen);

    std::ofstream corpus(fs::path(config.out_dir) / "corpus.txt",
                         std::ios::binary | std::ios::trunc);
    std::vector<AcceptedQuery> accepted;
    auto sink = [&](const AcceptedQuery& a) {
        corpus << "# meta seed=" << config.seed << " rule=" << a.rule_id << " parent=" << a.parent_id
               << "\n";
        corpus << print(*a.query) << "\n";
        accepted.push_back(a);
    };

    FuzzBudget budget{config.query_budget, config.seconds_budget};
    CampaignResult result;
    result.fuzz = fuzz_loop(catalog, ledger, config.criterion, budget, rng, pool, sink,
                            runtime_screen, profile, /*guided=*/true);
    corpus.close();

    // differential execution across worker lanes
    std::vector<Finding> findings;
    size_t per_case = config.targets.size();
    std::string fixture_id = fs::path(config.fixtures_path).filename().string();
    if (per_case > 0 && !accepted.empty()) {
        int lanes = std::max(1, config.workers);
        std::vector<std::vector<Finding>> lane_findings(static_cast<size_t>(lanes));
        std::atomic<size_t> cursor{0};
        auto work = [&](int lane) {
            std::vector<std::unique_ptr<TargetAdapter>> adapters =
                build_lane(config, opts, catalog, lane, lanes);
            std::vector<TargetAdapter*> targets;
            for (auto& a : adapters) targets.push_back(a.get());
            while (true) {
                size_t i = cursor.fetch_add(1);
                if (i >= accepted.size()) break;
                uint64_t first_id = 1 + static_cast<uint64_t>(i) * per_case;
                std::vector<Finding> fs_case =
                    run_case(*accepted[i].query, catalog, targets, opts, first_id, config.seed,
                             fixture_id, config.round_floats);
                for (Finding& f : fs_case) lane_findings[static_cast<size_t>(lane)].push_back(std::move(f));
            }
        };
        if (lanes == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (int lane = 0; lane < lanes; ++lane) threads.emplace_back(work, lane);
            for (std::thread& t : threads) t.join();
        }
        for (auto& lane : lane_findings) {
            for (Finding& f : lane) {
                ++result.findings_total;
                tally(result, f.verdict);
                if (f.verdict != CompareVerdict::Match) findings.push_back(std::move(f));
            }
        }
    }

    result.findings_dir = (fs::path(config.out_dir) / "findings").string();
    persist_findings(findings, result.findings_dir);

    {
        std::ofstream cov(fs::path(config.out_dir) / "coverage.txt",
                          std::ios::binary | std::ios::trunc);
        cov << ledger.report();
    }

    result.covered_keywords = ledger.covered_keywords();
    result.covered_rules = ledger.covered_rules();
    result.covered_composites = ledger.covered_composites();
    result.corpus_path = (fs::path(config.out_dir) / "corpus.txt").string();

    std::ostringstream summary;
    summary << "rounds " << result.fuzz.rounds << ", accepted " << result.fuzz.accepted
            << ", rejected(no-gain " << result.fuzz.rejected_no_gain << ", invalid "
            << result.fuzz.rejected_invalid << ", runtime " << result.fuzz.rejected_runtime
            << "), fallback seeds " << result.fuzz.fallback_seeds << "\n";
    summary << "coverage: keywords " << result.covered_keywords << "/" << total_keywords()
            << ", rules " << result.covered_rules << "/" << total_rules() << ", composites "
            << result.covered_composites << "\n";
    summary << "verdicts: match " << result.match << ", count-mismatch " << result.count_mismatch
            << ", content-mismatch " << result.content_mismatch << ", target-error "
            << result.target_error << ", reference-error " << result.reference_error << "\n";
    result.summary = summary.str();
    return result;
}

CoverageLedger replay_corpus(const std::string& corpus_path) {
    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw EngineError(ErrorKind::Fixture, "cannot open corpus: " + corpus_path);
    CoverageLedger ledger;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        QueryPtr q = parse(line);
        ledger.record(*q);
    }
    return ledger;
}

}  // namespace sqlsem
