// Acceptance suite: one test case per release criterion, each printing a
// single [PASS]/[FAIL] line. Run via ctest (target: acceptance) or directly.

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/agents/ensemble.hpp"
#include "pertkit/common/tsv.hpp"
#include "pertkit/difficulty/scheduler.hpp"
#include "pertkit/engine/audit.hpp"
#include "pertkit/engine/runner.hpp"
#include "pertkit/evalsuite/metrics.hpp"
#include "pertkit/gateway/oracle.hpp"
#include "pertkit/signature/consensus.hpp"
#include "pertkit/signature/stats.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace pertkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += why;
    }
    void expect(bool condition, const std::string& why) {
        if (!condition) {
            fail(why);
        }
    }
};

void report(int number, const std::string& label, const Outcome& outcome) {
    std::printf("[%s] criterion %d: %s%s%s\n", outcome.ok ? "PASS" : "FAIL", number,
                label.c_str(), outcome.ok ? "" : " :: ", outcome.detail.c_str());
    std::fflush(stdout);
    REQUIRE_MESSAGE(outcome.ok, outcome.detail);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// 1. Consensus correctness

TEST_CASE("criterion 1: consensus correctness") {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;

    using namespace pertkit::signature;
    auto make = [](const std::string& id, int reps, std::map<std::string, double> z) {
        ConditionSignature c;
        c.condition_id = id;
        c.cell_line = "A375";
        c.compound = "vemurafenib";
        c.replicate_count = reps;
        c.gene_z = std::move(z);
        c.high_quality = c.qc_pass = true;
        c.pert_type = PerturbationType::compound;
        return c;
    };
    const std::vector<ConditionSignature> fixture = {
        make("c1", 2, {{"G1", 2.0}, {"G2", -1.0}, {"G3", -1.5}, {"G4", 1.0}, {"G5", 0.5},
                       {"G6", -4.0}}),
        make("c2", 3, {{"G1", 1.0}, {"G2", -2.0}, {"G3", -0.5}, {"G4", -1.0}, {"G5", 0.5},
                       {"G6", -1.0}}),
        make("c3", 5, {{"G1", 3.0}, {"G2", 0.5}, {"G3", -2.5}, {"G4", 2.0}, {"G5", 0.0},
                       {"G6", -1.0}}),
    };

    // Hand-computed: G1 -> (3,0,3, 1.0, +2.2); G3 -> -1.7; G6 -> -1.6;
    // G2, G4, G5 at consistency 2/3 fall below the 0.7 cut.
    const auto records = build_consensus(fixture, 0.7);
    out.expect(records.size() == 3, "expected exactly 3 retained genes");
    if (records.size() == 3) {
        struct Expected {
            const char* gene;
            int n_up, n_down, n_total;
            double consistency, z;
            Direction dir;
        };
        const std::vector<Expected> expected = {
            {"G1", 3, 0, 3, 1.0, 2.2, Direction::up},
            {"G3", 0, 3, 3, 1.0, -1.7, Direction::down},
            {"G6", 0, 3, 3, 1.0, -1.6, Direction::down},
        };
        for (size_t i = 0; i < expected.size(); ++i) {
            const auto& e = expected[i];
            const auto& r = records[i];
            out.expect(r.gene == e.gene, std::string("gene order: ") + e.gene);
            out.expect(r.n_up == e.n_up && r.n_down == e.n_down && r.n_total == e.n_total,
                       std::string(e.gene) + " counts");
            out.expect(std::fabs(r.consistency - e.consistency) <= 1e-12,
                       std::string(e.gene) + " consistency to 1e-12");
            out.expect(std::fabs(r.consensus_z - e.z) <= 1e-12,
                       std::string(e.gene) + " consensus z to 1e-12");
            out.expect(r.direction == e.dir, std::string(e.gene) + " direction");
        }
    }

    // Boundary inclusion: exactly 0.7 is kept, 0.69 is not.
    std::vector<ConditionSignature> boundary;
    for (int i = 0; i < 10; ++i) {
        boundary.push_back(make("b" + std::to_string(i), 1, {{"B", i < 7 ? 1.0 : -1.0}}));
    }
    const auto kept = build_consensus(boundary, 0.7);
    out.expect(kept.size() == 1 && kept[0].consistency == 0.7,
               "consistency exactly 0.7 must be retained");

    std::vector<ConditionSignature> below;
    for (int i = 0; i < 100; ++i) {
        below.push_back(make("x" + std::to_string(i), 1, {{"C", i < 69 ? 1.0 : -1.0}}));
    }
    out.expect(build_consensus(below, 0.7).empty(), "consistency 0.69 must be dropped");

    const double elapsed = seconds_since(t0);
    out.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + "s exceeds 1s");
    report(1, "consensus correctness (hand-computed fixture, 0.7 boundary)", out);
}

// ---------------------------------------------------------------------------
// 2. Metric oracle equivalence

TEST_CASE("criterion 2: metric oracle equivalence") {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;

    // AUROC vs the exhaustive pairwise oracle: 200 random instances, n <= 12.
    std::mt19937_64 rng(20240801);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int auroc_checked = 0;
    for (int round = 0; round < 200; ++round) {
        const int n = 2 + static_cast<int>(rng() % 11);
        std::vector<double> scores;
        std::vector<bool> positive;
        for (int i = 0; i < n; ++i) {
            scores.push_back(std::round(unit(rng) * 8.0) / 8.0);  // ties are common
            positive.push_back(rng() % 2 == 0);
        }
        positive[0] = true;
        positive[n - 1] = false;
        std::vector<evalsuite::PredictionRecord> records;
        for (int i = 0; i < n; ++i) {
            evalsuite::PredictionRecord r;
            r.score = scores[i];
            r.true_label = positive[i] ? 1 : 0;
            records.push_back(r);
        }
        const auto value = evalsuite::auroc(records);
        if (!value || *value != testsupport::auroc_bruteforce(scores, positive)) {
            out.fail("auroc mismatch on instance " + std::to_string(round));
            break;
        }
        ++auroc_checked;
    }
    out.expect(auroc_checked == 200, "expected 200 auroc instances checked");

    // Mann-Whitney p vs exhaustive permutation enumeration on every input
    // with 2..6 observations per side, total <= 8, over the value alphabet
    // {0,1,2,3}. Four levels at this size cover every rank/tie pattern a
    // larger alphabet could produce, up to monotone relabeling, which is
    // exactly what the statistic depends on.
    long long mwu_checked = 0;
    bool mwu_ok = true;
    for (int n = 2; n <= 6 && mwu_ok; ++n) {
        for (int m = 2; n + m <= 8 && m <= 6 && mwu_ok; ++m) {
            const int total = n + m;
            std::vector<int> digits(total, 0);
            while (true) {
                std::vector<double> a(digits.begin(), digits.begin() + n);
                std::vector<double> b(digits.begin() + n, digits.end());
                const auto res = signature::mann_whitney_u(a, b);
                const double oracle_p = testsupport::mwu_permutation_p(a, b);
                if (!res.exact || res.p_value != oracle_p) {
                    out.fail("mwu mismatch at n=" + std::to_string(n) + " m=" +
                             std::to_string(m) + " p=" + std::to_string(res.p_value) +
                             " oracle=" + std::to_string(oracle_p));
                    mwu_ok = false;
                    break;
                }
                ++mwu_checked;
                int pos = total - 1;
                while (pos >= 0 && digits[pos] == 3) {
                    digits[pos--] = 0;
                }
                if (pos < 0) {
                    break;
                }
                ++digits[pos];
            }
        }
    }
    out.expect(mwu_checked > 100000, "enumeration unexpectedly small: " +
                                         std::to_string(mwu_checked));

    const double elapsed = seconds_since(t0);
    out.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
    report(2, "metric oracle equivalence (AUROC pairwise; Mann-Whitney permutation)", out);
}

// ---------------------------------------------------------------------------
// 3. Specificity identity

TEST_CASE("criterion 3: published specificity identity") {
    Outcome out;

    // Published pair: gap 0.177, dominance 64.6% => implied mean 0.177/0.646.
    const double implied_mean = 0.177 / 0.646;
    std::map<std::string, double> ratios = {{"A375", 0.451}, {"A549", 0.2386},
                                            {"MCF7", 0.2386}, {"PC3", 0.2386},
                                            {"HA1E", 0.2386}, {"HEPG2", 0.2386}};
    double mean = 0.0;
    for (const auto& [_, r] : ratios) {
        mean += r;
    }
    mean /= static_cast<double>(ratios.size());
    out.expect(std::fabs(mean - implied_mean) < 0.005,
               "fixture mean must sit within 0.5pp of the implied mean");

    const auto rep = evalsuite::build_specificity_report("vemurafenib", ratios, "A375");
    out.expect(rep.target_rank == 1, "target rank 1");
    out.expect(std::fabs(rep.mean_gap - 0.177) < 1e-9, "gap 0.177");
    out.expect(rep.relative_dominance_pct.has_value(), "dominance defined");
    if (rep.relative_dominance_pct) {
        out.expect(std::fabs(*rep.relative_dominance_pct - 64.6) < 0.5,
                   "dominance within 0.5pp of 64.6");
    }

    // The identity holds to 1e-9 for every emitted report.
    std::mt19937_64 rng(4711);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int round = 0; round < 200; ++round) {
        std::map<std::string, double> random_ratios;
        const int cells = 2 + static_cast<int>(rng() % 7);
        for (int c = 0; c < cells; ++c) {
            random_ratios["C" + std::to_string(c)] = unit(rng);
        }
        const auto r = evalsuite::build_specificity_report("d", random_ratios, "C0");
        double m = 0.0;
        for (const auto& [_, v] : random_ratios) {
            m += v;
        }
        m /= static_cast<double>(random_ratios.size());
        if (!r.relative_dominance_pct ||
            std::fabs(*r.relative_dominance_pct - 100.0 * r.mean_gap / m) > 1e-9) {
            out.fail("identity violated on random report " + std::to_string(round));
            break;
        }
    }
    report(3, "specificity identity (gap 0.177, dominance 64.6%, 1e-9 on all reports)", out);
}

// ---------------------------------------------------------------------------
// 4. Judge-gate law

TEST_CASE("criterion 4: judge-gate law") {
    Outcome out;
    std::mt19937_64 rng(990);

    const int judges = 4;
    const int max_retries = 3;
    const agents::QuerySpec query{"A375", "vemurafenib", "BRAF inhibitor", "DUSP6"};

    int mismatches = 0;
    for (int sequence = 0; sequence < 1000 && mismatches == 0; ++sequence) {
        // Random verdict matrix: attempts x judges, problematic with a
        // per-sequence rate.
        const double rate = 0.1 + 0.8 * (sequence % 10) / 9.0;
        std::vector<std::vector<bool>> verdicts(max_retries + 1, std::vector<bool>(judges));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto& row : verdicts) {
            for (size_t j = 0; j < row.size(); ++j) {
                row[j] = unit(rng) < rate;
            }
        }

        // Reference simulation: first clean attempt accepts; otherwise the
        // earliest attempt with the minimal problematic count comes back
        // flagged.
        bool ref_accepted = false;
        int ref_retries = 0;
        int ref_m = judges + 1;
        for (int attempt = 0; attempt <= max_retries; ++attempt) {
            int m = 0;
            for (bool v : verdicts[attempt]) {
                m += v ? 1 : 0;
            }
            if (m == 0) {
                ref_accepted = true;
                ref_retries = attempt;
                ref_m = 0;
                break;
            }
            if (m < ref_m) {
                ref_m = m;
            }
        }
        if (!ref_accepted) {
            ref_retries = max_retries;
        }

        // Drive the ensemble with the scripted verdict sequence.
        auto judge_calls = std::make_shared<int>(0);
        testsupport::FakeBackend backend([&, judge_calls](const gateway::ChatRequest& req) {
            const std::string sys = testsupport::system_text(req);
            if (sys.find("Cancer Dependency") != std::string::npos) {
                return std::string(
                    R"({"context_reasoning":"bg","pathway_activity":"active"})");
            }
            if (sys.find("Systems Biology") != std::string::npos) {
                return std::string(
                    R"({"network_reasoning":"path","edge_type":"complex"})");
            }
            if (sys.find("Molecular Pharmacologist") != std::string::npos) {
                return std::string(
                    R"({"mechanism_reasoning":"bind","primary_action":"inhibition"})");
            }
            if (sys.find("Molecular Biology Expert") != std::string::npos) {
                return std::string(R"({"reasoning":"synthesis","answer":"downregulated"})");
            }
            const int call = (*judge_calls)++;
            const int attempt = call / judges;
            const int judge = call % judges;
            const bool problematic = verdicts[attempt][judge];
            return std::string(R"({"verdict":")") +
                   (problematic ? "problematic" : "not-problematic") +
                   R"(","feedback":"scripted"})";
        });

        agents::EnsembleConfig cfg;
        cfg.k_samples = 1;
        cfg.max_retries = max_retries;
        cfg.root_seed = sequence;
        const agents::AgentEnsemble ensemble(backend, nullptr, cfg);
        const auto experts = ensemble.run_experts(query, "");
        const auto gated = ensemble.judge_gate(query, experts, "", std::nullopt, 0);

        if (gated.verified != ref_accepted || gated.retries != ref_retries ||
            gated.problem_count != ref_m) {
            out.fail("sequence " + std::to_string(sequence) + ": got (accepted=" +
                     std::to_string(gated.verified) + ", retries=" +
                     std::to_string(gated.retries) + ", m=" +
                     std::to_string(gated.problem_count) + "), reference (" +
                     std::to_string(ref_accepted) + ", " + std::to_string(ref_retries) + ", " +
                     std::to_string(ref_m) + ")");
            ++mismatches;
        }
        if (ref_accepted && gated.problem_count != 0) {
            out.fail("accepted trace with m != 0");
            ++mismatches;
        }
    }
    report(4, "judge-gate law (1000 scripted verdict sequences vs reference)", out);
}

// ---------------------------------------------------------------------------
// 5 & 6. End-to-end determinism and label-leak freedom

namespace {

struct PipelineFixture {
    explicit PipelineFixture(const testsupport::TempDir& dir) {
        // Two contexts, ten genes each: half up, half down.
        std::ostringstream cond, z, moa, moa_targets, edges, categories;
        cond << "condition_id\tcell_line\tcompound\tdose_um\ttime_h\treplicate_count\t"
                "is_hiq\tqc_pass\tpert_type\n";
        z << "condition_id\tgene\tz\n";
        moa << "compound\tmoa\n";
        moa_targets << "moa\tgene\n";
        edges << "geneA\tgeneB\tcombined_score\n";
        categories << "cell_line\tcategory\n";

        const std::vector<std::tuple<std::string, std::string, std::string, std::string>>
            contexts = {{"A375", "vem", "BRAF inhibitor", "BRAF"},
                        {"MCF7", "tam", "ER antagonist", "ESR1"}};
        int cond_index = 0;
        for (const auto& [cell, compound, moa_name, target] : contexts) {
            moa << compound << "\t" << moa_name << "\n";
            moa_targets << moa_name << "\t" << target << "\n";
            categories << cell << "\t" << (cell == "A375" ? "Skin" : "Breast") << "\n";
            std::vector<std::string> conds;
            for (int c = 0; c < 3; ++c) {
                const std::string id = "c" + std::to_string(cond_index++);
                conds.push_back(id);
                cond << id << "\t" << cell << "\t" << compound << "\t10\t24\t" << (c == 2 ? 2 : 1)
                     << "\t1\t1\tcompound\n";
            }
            for (int g = 0; g < 10; ++g) {
                const std::string gene = cell.substr(0, 1) + "G" + std::to_string(g);
                const double value = (g % 2 == 0 ? 1.0 : -1.0) * (2.0 - 0.1 * g);
                for (const auto& id : conds) {
                    z << id << "\t" << gene << "\t" << value << "\n";
                }
                edges << target << "\t" << gene << "\t" << (900 - 40 * g) << "\n";
                if (g > 0) {
                    edges << cell.substr(0, 1) << "G" << (g - 1) << "\t" << gene << "\t800\n";
                }
                truth[gateway::OracleWorld::key(cell, moa_name, gene)] =
                    g % 2 == 0 ? "upregulated" : "downregulated";
            }
        }
        write_text_file(dir.file("conditions.tsv"), cond.str());
        write_text_file(dir.file("zscores.tsv"), z.str());
        write_text_file(dir.file("compound_moa.tsv"), moa.str());
        write_text_file(dir.file("moa_targets.tsv"), moa_targets.str());
        write_text_file(dir.file("string_edges.tsv"), edges.str());
        write_text_file(dir.file("categories.tsv"), categories.str());

        gateway::OracleWorld world;
        world.truth = truth;
        world.base_accuracy_easy = 0.8;
        world.rng_seed = 5;
        write_text_file(dir.file("world.json"), world.to_json());

        write_text_file(dir.file("run.cfg"), "seed = 5\n"
                                             "trials = 2\n"
                                             "k_samples = 2\n"
                                             "history_cap = 3\n"
                                             "snapshot = " + dir.file("string_edges.tsv") +
                                                 "\n"
                                                 "moa_targets = " +
                                                 dir.file("moa_targets.tsv") +
                                                 "\n"
                                                 "oracle_world = " +
                                                 dir.file("world.json") + "\n");
    }

    std::unordered_map<std::string, std::string> truth;
};

int run_cli(const std::string& args, const std::string& log_path) {
    const char* bin = std::getenv("PERTKIT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "PERTKIT_BIN must point at the pertkit binary");
    const std::string cmd = std::string(bin) + " " + args + " >" + log_path + " 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

}  // namespace

TEST_CASE("criterion 5: end-to-end determinism") {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    testsupport::TempDir dir("accept5");
    PipelineFixture fixture(dir);
    const std::string cfg = " --config " + dir.file("run.cfg");
    const std::string log = dir.file("log.txt");

    out.expect(run_cli("build-benchmark --conditions " + dir.file("conditions.tsv") +
                           " --zscores " + dir.file("zscores.tsv") + " --moa " +
                           dir.file("compound_moa.tsv") + " --out " + dir.file("benchmark.jsonl") +
                           " --min-consistent 10",
                       log) == 0,
               "build-benchmark failed");

    // Record the oracle run once, then replay through the scripted backend.
    out.expect(run_cli("probe --benchmark " + dir.file("benchmark.jsonl") + " --out " +
                           dir.file("scores.jsonl") + cfg + " --record-script " +
                           dir.file("probe_script.jsonl"),
                       log) == 0,
               "probe (record) failed");
    out.expect(run_cli("probe --benchmark " + dir.file("benchmark.jsonl") + " --out " +
                           dir.file("scores_replay.jsonl") + cfg +
                           " --backend scripted --script " + dir.file("probe_script.jsonl"),
                       log) == 0,
               "probe (replay) failed");
    out.expect(read_text_file(dir.file("scores.jsonl")) ==
                   read_text_file(dir.file("scores_replay.jsonl")),
               "scores.jsonl differs between oracle and scripted replay");

    out.expect(run_cli("run --benchmark " + dir.file("benchmark.jsonl") + " --scores " +
                           dir.file("scores.jsonl") + " --out-dir " + dir.file("out_record") +
                           cfg + " --record-script " + dir.file("run_script.jsonl"),
                       log) == 0,
               "run (record) failed");

    auto scripted_run = [&](const std::string& out_dir, int workers) {
        return run_cli("run --benchmark " + dir.file("benchmark.jsonl") + " --scores " +
                           dir.file("scores.jsonl") + " --out-dir " + dir.file(out_dir) + cfg +
                           " --backend scripted --script " + dir.file("run_script.jsonl") +
                           " --workers " + std::to_string(workers),
                       log);
    };
    out.expect(scripted_run("out_a", 1) == 0, "scripted run A failed");
    out.expect(scripted_run("out_b", 1) == 0, "scripted run B failed");
    out.expect(scripted_run("out_c", 4) == 0, "scripted run C (workers=4) failed");

    const std::string traces_a = read_text_file(dir.file("out_a") + "/traces.jsonl");
    out.expect(!traces_a.empty(), "empty traces");
    out.expect(std::count(traces_a.begin(), traces_a.end(), '\n') == 20,
               "expected 20 trace lines");
    out.expect(traces_a == read_text_file(dir.file("out_b") + "/traces.jsonl"),
               "traces differ across two executions");
    out.expect(traces_a == read_text_file(dir.file("out_c") + "/traces.jsonl"),
               "traces differ across worker caps 1 and 4");
    const std::string preds_a = read_text_file(dir.file("out_a") + "/predictions.jsonl");
    out.expect(preds_a == read_text_file(dir.file("out_b") + "/predictions.jsonl"),
               "predictions differ across executions");
    out.expect(preds_a == read_text_file(dir.file("out_c") + "/predictions.jsonl"),
               "predictions differ across worker caps");

    auto evaluate_into = [&](const std::string& source_dir, const std::string& report) {
        return run_cli("evaluate --predictions " + dir.file(source_dir) +
                           "/predictions.jsonl --categories " + dir.file("categories.tsv") +
                           " --out " + dir.file(report),
                       log);
    };
    out.expect(evaluate_into("out_a", "report_a.json") == 0, "evaluate A failed");
    out.expect(evaluate_into("out_c", "report_c.json") == 0, "evaluate C failed");
    out.expect(read_text_file(dir.file("report_a.json")) ==
                   read_text_file(dir.file("report_c.json")),
               "evaluation reports differ");

    const double elapsed = seconds_since(t0);
    out.expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 1min");
    report(5, "end-to-end determinism (byte-identical traces and reports, caps 1 and 4)", out);
}

TEST_CASE("criterion 6: label-leak freedom") {
    Outcome out;

    // Forced-wrong backend: every predicted direction is the opposite of the
    // truth, so any truth pairing in a prompt can only come from the labels.
    const std::vector<std::pair<std::string, std::string>> contexts = {
        {"A375", "BRAF inhibitor"}, {"MCF7", "ER antagonist"}};
    std::map<std::string, std::string> truth_by_gene;
    std::vector<engine::ContextTask> tasks;
    for (const auto& [cell, moa] : contexts) {
        engine::ContextTask task;
        task.cell_line = cell;
        task.compound = cell == "A375" ? "vem" : "tam";
        task.moa = moa;
        for (int g = 0; g < 10; ++g) {
            const std::string gene = cell.substr(0, 1) + "G" + std::to_string(g);
            truth_by_gene[gene] = g % 2 == 0 ? "upregulated" : "downregulated";
            engine::ContextItem item;
            item.query = {cell, task.compound, moa, gene};
            item.composite = 0.9 - 0.05 * g;
            task.items.push_back(item);
        }
        tasks.push_back(task);
    }
    auto flip = [](const std::string& d) {
        return d == "upregulated" ? std::string("downregulated") : std::string("upregulated");
    };

    testsupport::FakeBackend wrong([&](const gateway::ChatRequest& req) -> std::string {
        const std::string sys = testsupport::system_text(req);
        const std::string user = testsupport::user_text(req);
        if (sys.find("Cancer Dependency") != std::string::npos) {
            return R"({"context_reasoning":"bg","pathway_activity":"active"})";
        }
        if (sys.find("Systems Biology") != std::string::npos) {
            return R"({"network_reasoning":"path","edge_type":"complex"})";
        }
        if (sys.find("Molecular Pharmacologist") != std::string::npos) {
            return R"({"mechanism_reasoning":"bind","primary_action":"inhibition"})";
        }
        if (sys.find("Molecular Biology Expert") != std::string::npos) {
            for (const auto& [gene, dir_word] : truth_by_gene) {
                if (user.find(", will " + gene + " be ") != std::string::npos) {
                    return R"({"reasoning":"synthesis","answer":")" + flip(dir_word) + R"("})";
                }
            }
            return R"({"reasoning":"synthesis","answer":"upregulated"})";
        }
        return R"({"verdict":"not-problematic","feedback":"ok"})";
    });

    engine::PromptAuditor auditor;
    gateway::TapBackend tapped(
        std::make_shared<testsupport::FakeBackend>(wrong),
        [&auditor](const gateway::ChatRequest& req) { auditor.record(req); });

    knowledge::SnapshotSource snapshot;
    for (const auto& task : tasks) {
        for (size_t g = 1; g < task.items.size(); ++g) {
            snapshot.add_edge(task.items[g - 1].query.gene, task.items[g].query.gene, 800);
        }
    }
    agents::EnsembleConfig ecfg;
    ecfg.k_samples = 2;
    ecfg.root_seed = 5;
    agents::AgentEnsemble ensemble(tapped, nullptr, ecfg);
    engine::EngineConfig cfg;
    cfg.history_cap = 3;
    engine::ProgressiveRunner runner(ensemble, snapshot, cfg);
    const auto results = runner.run(tasks, false);

    engine::LeakScanInput scan;
    scan.prompts = auditor.snapshot();
    scan.truth = truth_by_gene;
    size_t trace_count = 0;
    for (const auto& result : results) {
        for (const auto& record : result.traces) {
            ++trace_count;
            for (const auto& vote : record.trace.votes) {
                if (vote != "invalid") {
                    scan.model_outputs[record.trace.query.gene].insert(vote);
                }
            }
        }
    }
    out.expect(trace_count == 20, "expected 20 traces");
    out.expect(scan.prompts.size() > 100, "expected every request captured");
    const auto violations = engine::scan_for_leaks(scan);
    for (const auto& v : violations) {
        out.fail(v);
    }

    // The scanner itself must catch a planted leak.
    engine::LeakScanInput planted = scan;
    planted.prompts.push_back("- AG0: predicted " + truth_by_gene["AG0"] + " :: planted");
    out.expect(!engine::scan_for_leaks(planted).empty(), "scanner missed a planted leak");

    report(6, "label-leak freedom (forced-wrong run, zero truth pairings in prompts)", out);
}

// ---------------------------------------------------------------------------
// 7. Progressive benefit

TEST_CASE("criterion 7: progressive benefit at desk scale") {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;

    // 50 contexts x 10 genes = 500 samples; half easy, half hard. Each hard
    // gene is related to one easy gene. The oracle raises hard-gene accuracy
    // by 0.2 when a correct related easy-gene entry is in the prompt.
    const int n_contexts = 50;
    const int genes_per_context = 10;
    gateway::OracleWorld base_world;
    base_world.base_accuracy_easy = 0.95;
    base_world.base_accuracy_hard = 0.55;
    base_world.context_boost = 0.2;

    std::vector<engine::ContextTask> tasks;
    knowledge::SnapshotSource snapshot;
    knowledge::MoaTargetMap moa_map;
    for (int c = 0; c < n_contexts; ++c) {
        engine::ContextTask task;
        task.cell_line = "CELL" + std::to_string(c);
        task.compound = "drug" + std::to_string(c);
        task.moa = "moa" + std::to_string(c);
        const std::string target = "T" + std::to_string(c);
        moa_map.add(task.moa, target);
        for (int g = 0; g < genes_per_context; ++g) {
            const bool hard = g >= genes_per_context / 2;
            const std::string gene = "C" + std::to_string(c) + (hard ? "H" : "E") +
                                     std::to_string(g % (genes_per_context / 2));
            const std::string key = gateway::OracleWorld::key(task.cell_line, task.moa, gene);
            base_world.truth[key] = (c + g) % 2 == 0 ? "upregulated" : "downregulated";
            if (hard) {
                base_world.hard.insert(key);
                const std::string easy_partner = "C" + std::to_string(c) + "E" +
                                                 std::to_string(g % (genes_per_context / 2));
                auto pair = gene < easy_partner ? std::make_pair(gene, easy_partner)
                                                : std::make_pair(easy_partner, gene);
                base_world.relations.insert(pair);
                snapshot.add_edge(gene, easy_partner, 800);
            }
            snapshot.add_edge(target, gene, hard ? 300 : 900);
            engine::ContextItem item;
            item.query = {task.cell_line, task.compound, task.moa, gene};
            task.items.push_back(item);
        }
        tasks.push_back(task);
    }

    auto accuracy_of = [&](const std::vector<engine::ContextResult>& results) {
        int correct = 0;
        int total = 0;
        for (const auto& r : results) {
            for (const auto& record : r.traces) {
                ++total;
                const auto it = base_world.truth.find(gateway::OracleWorld::key(
                    record.trace.query.cell_line, record.trace.query.moa,
                    record.trace.query.gene));
                if (it != base_world.truth.end() && record.trace.final_answer == it->second) {
                    ++correct;
                }
            }
        }
        return std::make_pair(correct, total);
    };

    double diff_sum = 0.0;
    const int n_seeds = 20;
    for (int seed = 0; seed < n_seeds; ++seed) {
        gateway::OracleWorld world = base_world;
        world.rng_seed = 1000 + seed;
        gateway::OracleBackend backend(world);

        agents::EnsembleConfig ecfg;
        ecfg.k_samples = 1;
        ecfg.root_seed = 5000 + seed;

        // Arm A: probe-driven easy-first ordering with history.
        difficulty::ProbeConfig probe;
        probe.trials = 5;
        probe.root_seed = ecfg.root_seed;
        std::vector<engine::ContextTask> ordered_tasks;
        for (const auto& task : tasks) {
            std::vector<difficulty::DifficultyScore> scores;
            for (const auto& item : task.items) {
                scores.push_back(difficulty::score_sample(item.query, backend, probe, moa_map,
                                                          snapshot));
            }
            engine::ContextTask ordered = task;
            ordered.items.clear();
            for (const auto& s : difficulty::sort_easy_first(std::move(scores))) {
                engine::ContextItem item;
                item.query = s.query;
                item.query.moa = task.moa;
                item.composite = s.composite;
                ordered.items.push_back(item);
            }
            ordered_tasks.push_back(std::move(ordered));
        }
        agents::AgentEnsemble ensemble(backend, &moa_map, ecfg);
        engine::EngineConfig progressive_cfg;
        progressive_cfg.history_cap = 5;
        engine::ProgressiveRunner progressive(ensemble, snapshot, progressive_cfg);
        const auto [correct_a, total_a] = accuracy_of(progressive.run(ordered_tasks, false));

        // Arm B: shuffled order, no history.
        std::mt19937_64 shuffle_rng(777 + seed);
        std::vector<engine::ContextTask> shuffled_tasks = tasks;
        for (auto& task : shuffled_tasks) {
            std::shuffle(task.items.begin(), task.items.end(), shuffle_rng);
        }
        engine::EngineConfig flat_cfg;
        flat_cfg.history_cap = 0;
        engine::ProgressiveRunner flat(ensemble, snapshot, flat_cfg);
        const auto [correct_b, total_b] = accuracy_of(flat.run(shuffled_tasks, false));

        out.expect(total_a == 500 && total_b == 500, "expected 500 samples per arm");
        diff_sum += static_cast<double>(correct_a) / total_a -
                    static_cast<double>(correct_b) / total_b;
    }

    const double mean_diff = diff_sum / n_seeds;
    out.expect(mean_diff >= 0.05,
               "paired accuracy gain " + std::to_string(mean_diff) + " below 5pp");

    const double elapsed = seconds_since(t0);
    out.expect(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2min");
    std::ostringstream label;
    label << "progressive benefit (mean paired gain " << std::fixed << std::setprecision(3)
          << mean_diff << " over " << n_seeds << " seeds)";
    report(7, label.str(), out);
}

// ---------------------------------------------------------------------------
// 8. Scheduler invariance

TEST_CASE("criterion 8: difficulty-scheduler argsort invariance") {
    Outcome out;
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::function<double(double)>> transforms = {
        [](double x) { return 7.0 * x + 2.0; },
        [](double x) { return x * x * x; },
        [](double x) { return std::exp(2.0 * x); },
        [](double x) { return std::atan(x) + 10.0; },
    };

    for (int round = 0; round < 1000 && out.ok; ++round) {
        std::vector<difficulty::DifficultyScore> scores;
        const int n = 2 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            difficulty::DifficultyScore s;
            s.query = {"A375", "vem", "m", "G" + std::to_string(i)};
            s.composite = (rng() % 7 == 0) ? 0.5 : unit(rng);  // deliberate ties
            scores.push_back(s);
        }
        const auto baseline = difficulty::sort_easy_first(scores);
        const auto& f = transforms[round % transforms.size()];
        auto transformed = scores;
        for (auto& s : transformed) {
            s.composite = f(s.composite);
        }
        const auto sorted = difficulty::sort_easy_first(transformed);
        for (size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i].query.gene != baseline[i].query.gene) {
                out.fail("order changed under monotone transform in round " +
                         std::to_string(round));
                break;
            }
        }
    }
    report(8, "difficulty-scheduler argsort invariance (1000 random vectors)", out);
}
