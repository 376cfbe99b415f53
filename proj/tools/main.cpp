// pertkit: perturbation-response benchmark curation, difficulty-ordered
// multi-agent direction prediction, and evaluation metrics.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pertkit/agents/ensemble.hpp"
#include "pertkit/common/config.hpp"
#include "pertkit/common/errors.hpp"
#include "pertkit/common/tsv.hpp"
#include "pertkit/difficulty/scheduler.hpp"
#include "pertkit/engine/audit.hpp"
#include "pertkit/engine/runner.hpp"
#include "pertkit/evalsuite/report.hpp"
#include "pertkit/gateway/live.hpp"
#include "pertkit/gateway/oracle.hpp"
#include "pertkit/knowledge/live.hpp"
#include "pertkit/knowledge/relatedness.hpp"
#include "pertkit/signature/consensus.hpp"
#include "pertkit/signature/de.hpp"
#include "pertkit/signature/io.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace pertkit;

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // key, value
};

Config effective_config(const CommonFlags& flags) {
    Config cfg;
    if (!flags.config_path.empty()) {
        cfg = Config::load_file(flags.config_path);
    }
    for (const auto& [key, value] : flags.overrides) {
        cfg.set(key, value);
    }
    return cfg;
}

// Ties a CLI option to a config key; the flag wins over the file.
void bind_option(CLI::App* cmd, CommonFlags& flags, const std::string& flag,
                 const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
           flag,
           [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); },
           help)
        ->expected(1);
}

void add_config_option(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "plain-text key = value configuration file");
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_manifest(const std::string& command, const Config& cfg,
                    const std::map<std::string, std::string>& inputs,
                    const std::map<std::string, std::string>& outputs) {
    // One manifest per artifact directory, next to the primary output.
    std::string dir = ".";
    if (!outputs.empty()) {
        const fs::path p(outputs.begin()->second);
        if (p.has_parent_path()) {
            dir = p.parent_path().string();
        }
    }
    fs::create_directories(dir);
    ordered_json j;
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    j["inputs"] = ordered_json::object();
    for (const auto& [k, v] : inputs) {
        j["inputs"][k] = v;
    }
    j["outputs"] = ordered_json::object();
    for (const auto& [k, v] : outputs) {
        j["outputs"][k] = v;
    }
    j["root_seed"] = cfg.get_int("seed", 0);
    j["seed_policy"] = "per-request seeds derived from the root seed and sample identity";
    j["created_at"] = iso_timestamp();
    write_text_file(dir + "/run_manifest.json", j.dump(2) + "\n");
}

std::shared_ptr<gateway::ChatBackend> make_backend(const Config& cfg,
                                                   engine::PromptAuditor* auditor) {
    const std::string kind = cfg.get("backend", "oracle");
    std::shared_ptr<gateway::ChatBackend> backend;
    if (kind == "scripted") {
        backend = std::make_shared<gateway::ScriptedBackend>(
            gateway::ScriptedBackend::load(cfg.require("script")));
    } else if (kind == "oracle") {
        gateway::OracleWorld world;
        if (cfg.has("oracle_world")) {
            world = gateway::OracleWorld::load(cfg.get("oracle_world", ""));
        } else {
            world.rng_seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
        }
        backend = std::make_shared<gateway::OracleBackend>(std::move(world));
    } else if (kind == "live") {
        gateway::LiveBackendConfig live;
        live.base_url = cfg.require("live_base_url");
        live.path = cfg.get("live_path", live.path);
        live.api_key_env = cfg.get("live_api_key_env", live.api_key_env);
        live.timeout_ms = static_cast<int>(cfg.get_int("live_timeout_ms", live.timeout_ms));
        const auto backoff = cfg.get_int_list("live_backoff_ms", {500, 1000, 2000});
        live.backoff_ms.assign(backoff.begin(), backoff.end());
        backend = std::make_shared<gateway::LiveBackend>(std::move(live));
    } else {
        throw ConfigError("unknown backend '" + kind + "' (expected live, scripted or oracle)");
    }

    if (cfg.has("record_script")) {
        auto writer = std::make_shared<gateway::ScriptWriter>(cfg.get("record_script", ""));
        backend = std::make_shared<gateway::RecordingBackend>(backend, writer);
    }
    if (auditor != nullptr) {
        backend = std::make_shared<gateway::TapBackend>(
            backend, [auditor](const gateway::ChatRequest& req) { auditor->record(req); });
    }
    const int cap = static_cast<int>(cfg.get_int("inflight_cap", 8));
    return std::make_shared<gateway::ConcurrencyLimiter>(backend, cap);
}

std::shared_ptr<knowledge::RelatednessSource> make_relatedness_source(const Config& cfg) {
    std::shared_ptr<knowledge::RelatednessSource> source;
    if (cfg.has("relatedness_live_url")) {
        knowledge::LiveSourceConfig live;
        live.base_url = cfg.get("relatedness_live_url", "");
        live.path = cfg.get("relatedness_live_path", live.path);
        live.species = cfg.get("relatedness_species", live.species);
        live.timeout_ms = static_cast<int>(cfg.get_int("relatedness_timeout_ms", live.timeout_ms));
        source = std::make_shared<knowledge::LiveSource>(std::move(live));
    } else if (cfg.has("snapshot")) {
        source = std::make_shared<knowledge::SnapshotSource>(
            knowledge::SnapshotSource::load(cfg.get("snapshot", "")));
    } else {
        source = std::make_shared<knowledge::SnapshotSource>();  // empty: everything absent
    }
    if (cfg.get_bool("relatedness_degrade", false)) {
        source = std::make_shared<knowledge::DegradingSource>(source);
    }
    return std::make_shared<knowledge::CachingSource>(source);
}

knowledge::MoaTargetMap make_moa_targets(const Config& cfg) {
    if (cfg.has("moa_targets")) {
        return knowledge::MoaTargetMap::load(cfg.get("moa_targets", ""));
    }
    return {};
}

knowledge::Aggregation relatedness_mode(const Config& cfg) {
    const std::string mode = cfg.get("relatedness_mode", "max");
    if (mode == "max") {
        return knowledge::Aggregation::max;
    }
    if (mode == "mean") {
        return knowledge::Aggregation::mean;
    }
    throw ConfigError("relatedness_mode must be max or mean, got '" + mode + "'");
}

agents::EnsembleConfig ensemble_config(const Config& cfg) {
    agents::EnsembleConfig ec;
    ec.model = cfg.get("model", ec.model);
    ec.temperature = cfg.get_double("temperature", ec.temperature);
    ec.max_tokens = static_cast<int>(cfg.get_int("max_tokens", ec.max_tokens));
    ec.max_retries = static_cast<int>(cfg.get_int("max_retries", ec.max_retries));
    ec.k_samples = static_cast<int>(cfg.get_int("k_samples", ec.k_samples));
    ec.judge4_enabled = cfg.get_bool("judge4", true);
    ec.root_seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
    return ec;
}

void dump_prompts(const Config& cfg, const engine::PromptAuditor& auditor) {
    if (!cfg.has("audit_prompts")) {
        return;
    }
    std::string out;
    for (const auto& prompt : auditor.snapshot()) {
        ordered_json j;
        j["prompt"] = prompt;
        out += j.dump();
        out += '\n';
    }
    write_text_file(cfg.get("audit_prompts", ""), out);
}

// ---------------------------------------------------------------------------
// build-benchmark

int cmd_build_benchmark(const CommonFlags& flags, const std::string& conditions,
                        const std::string& zscores, const std::string& moa_path,
                        const std::string& out) {
    const Config cfg = effective_config(flags);
    const double threshold = cfg.get_double("threshold", 0.7);
    signature::SelectionOptions opts;
    opts.per_direction = static_cast<int>(cfg.get_int("per_direction", 10));
    opts.min_consistent = static_cast<int>(cfg.get_int("min_consistent", 40));
    opts.split = cfg.get("split", "test");

    const auto loaded = signature::load_conditions(conditions, zscores);
    for (const auto& d : loaded.diagnostics) {
        std::cerr << "warning: " << d << "\n";
    }
    const auto moa_by_compound = signature::load_compound_moa(moa_path);

    signature::QualityPolicy policy;
    policy.annotated_compounds.emplace();
    for (const auto& [compound, _] : moa_by_compound) {
        policy.annotated_compounds->push_back(compound);
    }
    const auto kept = signature::filter_signatures(loaded.signatures, policy);

    std::map<std::pair<std::string, std::string>, std::vector<signature::ConditionSignature>>
        by_pair;
    for (const auto& sig : kept) {
        by_pair[{sig.cell_line, sig.compound}].push_back(sig);
    }

    std::vector<signature::BenchmarkItem> items;
    TsvWriter rejects({"cell_line", "compound", "reason"});
    for (const auto& [pair, conds] : by_pair) {
        const auto records = signature::build_consensus(conds, threshold);
        const auto selection = signature::select_query_genes(
            records, pair.first, pair.second, moa_by_compound.at(pair.second), opts);
        if (selection.rejected) {
            rejects.add_row({pair.first, pair.second, selection.rejection_reason});
            continue;
        }
        items.insert(items.end(), selection.items.begin(), selection.items.end());
    }

    write_text_file(out, signature::benchmark_to_jsonl(items));
    rejects.write_file(out + ".rejects.tsv");
    write_manifest("build-benchmark", cfg,
                   {{"conditions", conditions}, {"zscores", zscores}, {"compound_moa", moa_path}},
                   {{"benchmark", out}, {"rejects", out + ".rejects.tsv"}});
    std::cerr << "wrote " << items.size() << " benchmark items to " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// probe / sort

int cmd_probe(const CommonFlags& flags, const std::string& benchmark_path,
              const std::string& out) {
    const Config cfg = effective_config(flags);
    // Configuration problems surface before any input is touched.
    engine::PromptAuditor auditor;
    auto backend = make_backend(cfg, cfg.has("audit_prompts") ? &auditor : nullptr);
    auto source = make_relatedness_source(cfg);
    const auto moa_targets = make_moa_targets(cfg);
    relatedness_mode(cfg);

    const auto items = signature::load_benchmark(benchmark_path);

    difficulty::ProbeConfig probe;
    probe.model = cfg.get("model", probe.model);
    probe.temperature = cfg.get_double("temperature", probe.temperature);
    probe.trials = static_cast<int>(cfg.get_int("trials", probe.trials));
    probe.root_seed = static_cast<uint64_t>(cfg.get_int("seed", 0));

    std::map<std::pair<std::string, std::string>, std::vector<difficulty::DifficultyScore>>
        by_context;
    for (const auto& item : items) {
        agents::QuerySpec query{item.cell_line, item.compound, item.moa, item.gene};
        auto score = difficulty::score_sample(query, *backend, probe, moa_targets, *source,
                                              relatedness_mode(cfg));
        by_context[{item.cell_line, item.compound}].push_back(std::move(score));
    }

    std::vector<difficulty::DifficultyScore> ordered;
    for (auto& [_, scores] : by_context) {
        auto sorted = difficulty::sort_easy_first(std::move(scores));
        ordered.insert(ordered.end(), sorted.begin(), sorted.end());
    }

    write_text_file(out, difficulty::scores_to_jsonl(ordered));
    dump_prompts(cfg, auditor);
    write_manifest("probe", cfg, {{"benchmark", benchmark_path}}, {{"scores", out}});
    std::cerr << "wrote " << ordered.size() << " difficulty scores to " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const CommonFlags& flags, const std::string& benchmark_path,
            const std::string& scores_path, const std::string& out_dir, bool resume,
            bool no_history) {
    const Config cfg = effective_config(flags);
    engine::PromptAuditor auditor;
    auto backend = make_backend(cfg, cfg.has("audit_prompts") ? &auditor : nullptr);
    auto source = make_relatedness_source(cfg);
    const auto moa_targets = make_moa_targets(cfg);

    const auto items = signature::load_benchmark(benchmark_path);
    const auto scores = difficulty::scores_from_jsonl(read_text_file(scores_path), scores_path);

    std::map<std::string, const signature::BenchmarkItem*> item_by_key;
    for (const auto& item : items) {
        item_by_key[item.cell_line + "|" + item.compound + "|" + item.gene] = &item;
    }

    // Join scores onto benchmark items and group into contexts.
    std::map<std::pair<std::string, std::string>, std::vector<difficulty::DifficultyScore>>
        scores_by_context;
    std::set<std::string> scored_keys;
    for (const auto& s : scores) {
        const std::string key = s.query.cell_line + "|" + s.query.compound + "|" + s.query.gene;
        if (!item_by_key.count(key)) {
            continue;  // scores for samples outside this benchmark are ignored
        }
        scored_keys.insert(key);
        scores_by_context[{s.query.cell_line, s.query.compound}].push_back(s);
    }
    for (const auto& [key, _] : item_by_key) {
        if (!scored_keys.count(key)) {
            throw InputError("sample '" + key + "' has no difficulty score in " + scores_path);
        }
    }

    std::vector<engine::ContextTask> tasks;
    for (auto& [pair, ctx_scores] : scores_by_context) {
        engine::ContextTask task;
        task.cell_line = pair.first;
        task.compound = pair.second;
        const auto sorted = difficulty::sort_easy_first(std::move(ctx_scores));
        for (const auto& s : sorted) {
            const auto* item =
                item_by_key.at(s.query.cell_line + "|" + s.query.compound + "|" + s.query.gene);
            task.moa = item->moa;
            engine::ContextItem ci;
            ci.query = agents::QuerySpec{item->cell_line, item->compound, item->moa, item->gene};
            ci.composite = s.composite;
            task.items.push_back(std::move(ci));
        }
        tasks.push_back(std::move(task));
    }

    agents::AgentEnsemble ensemble(*backend, &moa_targets, ensemble_config(cfg));

    engine::EngineConfig ec;
    ec.history_cap = no_history ? 0 : static_cast<int>(cfg.get_int("history_cap", 5));
    ec.summary_char_cap = static_cast<int>(cfg.get_int("history_char_cap", 600));
    ec.include_unverified = cfg.get_bool("include_unverified_history", false);
    ec.workers = static_cast<int>(cfg.get_int("workers", 1));
    ec.state_dir = out_dir + "/run_state";
    ec.config_hash = cfg.hash();

    fs::create_directories(out_dir);
    engine::ProgressiveRunner runner(ensemble, *source, ec);
    const auto results = runner.run(tasks, resume);

    write_text_file(out_dir + "/traces.jsonl", engine::merge_traces(results));

    std::vector<evalsuite::PredictionRecord> predictions;
    const int run_id = static_cast<int>(cfg.get_int("run_id", 0));
    for (const auto& result : results) {
        for (const auto& record : result.traces) {
            evalsuite::PredictionRecord p;
            p.cell_line = record.trace.query.cell_line;
            p.compound = record.trace.query.compound;
            p.moa = record.trace.query.moa;
            p.gene = record.trace.query.gene;
            p.score = record.trace.score;
            p.predicted_label = record.trace.final_answer;
            const auto* item = item_by_key.at(p.cell_line + "|" + p.compound + "|" + p.gene);
            p.true_label = item->label;
            p.run_id = run_id;
            predictions.push_back(std::move(p));
        }
    }
    write_text_file(out_dir + "/predictions.jsonl", evalsuite::predictions_to_jsonl(predictions));

    dump_prompts(cfg, auditor);
    write_manifest("run", cfg, {{"benchmark", benchmark_path}, {"scores", scores_path}},
                   {{"traces", out_dir + "/traces.jsonl"},
                    {"predictions", out_dir + "/predictions.jsonl"}});
    std::cerr << "wrote " << predictions.size() << " traces to " << out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const CommonFlags& flags, const std::string& predictions_path,
                 const std::string& categories_path, const std::string& out,
                 const std::string& text_out) {
    const Config cfg = effective_config(flags);
    const std::string mode_name = cfg.get("eval_mode", "pooled");
    evalsuite::AurocMode mode;
    if (mode_name == "pooled") {
        mode = evalsuite::AurocMode::pooled;
    } else if (mode_name == "per-perturbation" || mode_name == "per_perturbation") {
        mode = evalsuite::AurocMode::per_perturbation;
    } else {
        throw ConfigError("eval_mode must be pooled or per-perturbation, got '" + mode_name + "'");
    }

    auto records = evalsuite::load_predictions(predictions_path);
    if (!categories_path.empty()) {
        records = evalsuite::apply_categories(records, evalsuite::load_categories(categories_path));
    }
    const auto report = evalsuite::evaluate(records, mode);
    write_text_file(out, evalsuite::report_to_json(report));
    if (!text_out.empty()) {
        write_text_file(text_out, evalsuite::report_to_text(report));
    }
    std::map<std::string, std::string> outputs = {{"report", out}};
    if (!text_out.empty()) {
        outputs["report_text"] = text_out;
    }
    write_manifest("evaluate", cfg,
                   {{"predictions", predictions_path}, {"categories", categories_path}}, outputs);
    std::cout << evalsuite::report_to_text(report);
    return 0;
}

// ---------------------------------------------------------------------------
// case-study

int cmd_case_study(const CommonFlags& flags, const std::string& predictions_path,
                   const std::string& target, const std::string& out,
                   const std::string& text_out) {
    const Config cfg = effective_config(flags);
    const auto records = evalsuite::load_predictions(predictions_path);
    const auto reports = evalsuite::case_study(records, target);
    write_text_file(out, evalsuite::specificity_to_json(reports));
    if (!text_out.empty()) {
        write_text_file(text_out, evalsuite::specificity_to_text(reports));
    }
    std::map<std::string, std::string> outputs = {{"report", out}};
    if (!text_out.empty()) {
        outputs["report_text"] = text_out;
    }
    write_manifest("case-study", cfg, {{"predictions", predictions_path}}, outputs);
    std::cout << evalsuite::specificity_to_text(reports);
    return 0;
}

// ---------------------------------------------------------------------------
// label-de

int cmd_label_de(const CommonFlags& flags, const std::string& pseudobulk_treated,
                 const std::string& pseudobulk_control, const std::string& cells_path,
                 const std::string& out) {
    const Config cfg = effective_config(flags);
    const double fdr = cfg.get_double("fdr", 0.05);
    const double lfc = cfg.get_double("lfc", 0.5);

    const auto treated = signature::load_pseudobulk(pseudobulk_treated);
    const auto control = signature::load_pseudobulk(pseudobulk_control);
    const auto cells = signature::load_cells(cells_path);

    const auto result =
        signature::label_pseudobulk_de(treated, control, cells.treated, cells.control, fdr, lfc);
    for (const auto& [gene, reason] : result.skipped) {
        std::cerr << "skipped gene '" << gene << "': " << reason << "\n";
    }

    TsvWriter w({"gene", "label", "p_value", "q_value", "log2_fc"});
    for (const auto& [gene, g] : result.genes) {
        w.add_row({gene, to_string(g.label), format_double(g.p_value), format_double(g.q_value),
                   format_double(g.log2_fc)});
    }
    w.write_file(out);
    write_manifest("label-de", cfg,
                   {{"pseudobulk_treated", pseudobulk_treated},
                    {"pseudobulk_control", pseudobulk_control},
                    {"cells", cells_path}},
                   {{"labels", out}});
    std::cerr << "labeled " << result.genes.size() << " genes, skipped " << result.skipped.size()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbation-response reasoning pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;

    // build-benchmark
    std::string conditions, zscores, moa_path, bench_out;
    auto* build = app.add_subcommand("build-benchmark",
                                     "curate consensus signatures into benchmark queries");
    add_config_option(build, flags);
    build->add_option("--conditions", conditions, "conditions.tsv")->required();
    build->add_option("--zscores", zscores, "zscores.tsv")->required();
    build->add_option("--moa", moa_path, "compound_moa.tsv (compound, moa)")->required();
    build->add_option("--out", bench_out, "output benchmark.jsonl")->required();
    bind_option(build, flags, "--threshold", "threshold", "consistency threshold (default 0.7)");
    bind_option(build, flags, "--per-direction", "per_direction", "genes per direction");
    bind_option(build, flags, "--min-consistent", "min_consistent",
                "minimum consistent genes per pair");
    bind_option(build, flags, "--split", "split", "split tag for emitted items");

    // probe (alias: sort)
    std::string probe_benchmark, probe_out;
    auto* probe = app.add_subcommand("probe", "compute difficulty scores and easy-first order");
    probe->alias("sort");
    add_config_option(probe, flags);
    probe->add_option("--benchmark", probe_benchmark, "benchmark.jsonl")->required();
    probe->add_option("--out", probe_out, "output scores.jsonl")->required();
    bind_option(probe, flags, "--backend", "backend", "live | scripted | oracle");
    bind_option(probe, flags, "--trials", "trials", "probe trials per sample");
    bind_option(probe, flags, "--seed", "seed", "root seed");
    bind_option(probe, flags, "--script", "script", "replay script for the scripted backend");
    bind_option(probe, flags, "--record-script", "record_script", "record a replay script");
    bind_option(probe, flags, "--oracle-world", "oracle_world", "oracle world JSON");

    // run
    std::string run_benchmark, run_scores, run_out_dir;
    bool run_resume = false;
    bool run_no_history = false;
    auto* run = app.add_subcommand("run", "progressive multi-agent prediction");
    add_config_option(run, flags);
    run->add_option("--benchmark", run_benchmark, "benchmark.jsonl")->required();
    run->add_option("--scores", run_scores, "scores.jsonl from probe")->required();
    run->add_option("--out-dir", run_out_dir, "output directory")->required();
    run->add_flag("--resume", run_resume, "continue from run_state checkpoints");
    run->add_flag("--no-history", run_no_history, "ablation: history cap 0");
    bind_option(run, flags, "--backend", "backend", "live | scripted | oracle");
    bind_option(run, flags, "--seed", "seed", "root seed");
    bind_option(run, flags, "--workers", "workers", "parallel contexts");
    bind_option(run, flags, "--run-id", "run_id", "run id recorded in predictions");
    bind_option(run, flags, "--k-samples", "k_samples", "repetitions behind the score");
    bind_option(run, flags, "--history-cap", "history_cap", "history entries per sample");
    bind_option(run, flags, "--script", "script", "replay script for the scripted backend");
    bind_option(run, flags, "--record-script", "record_script", "record a replay script");
    bind_option(run, flags, "--oracle-world", "oracle_world", "oracle world JSON");

    // evaluate
    std::string eval_predictions, eval_categories, eval_out, eval_text;
    auto* evaluate = app.add_subcommand("evaluate", "per-category AUROC report");
    add_config_option(evaluate, flags);
    evaluate->add_option("--predictions", eval_predictions, "predictions.jsonl")->required();
    evaluate->add_option("--categories", eval_categories, "celline_categories.tsv");
    evaluate->add_option("--out", eval_out, "report JSON path")->required();
    evaluate->add_option("--text", eval_text, "aligned text table path");
    bind_option(evaluate, flags, "--mode", "eval_mode", "pooled | per-perturbation");

    // case-study
    std::string case_predictions, case_target, case_out, case_text;
    auto* case_study_cmd =
        app.add_subcommand("case-study", "cell-line specificity metrics per drug");
    add_config_option(case_study_cmd, flags);
    case_study_cmd->add_option("--predictions", case_predictions, "predictions.jsonl")->required();
    case_study_cmd->add_option("--target", case_target, "target cell line")->required();
    case_study_cmd->add_option("--out", case_out, "report JSON path")->required();
    case_study_cmd->add_option("--text", case_text, "aligned text table path");

    // label-de
    std::string de_treated, de_control, de_cells, de_out;
    auto* label_de = app.add_subcommand("label-de",
                                        "pseudobulk differential-expression labels");
    add_config_option(label_de, flags);
    label_de->add_option("--pseudobulk-treated", de_treated, "treated pseudobulk.tsv")->required();
    label_de->add_option("--pseudobulk-control", de_control, "control pseudobulk.tsv")->required();
    label_de->add_option("--cells", de_cells, "cells.tsv with group column")->required();
    label_de->add_option("--out", de_out, "output labels.tsv")->required();
    bind_option(label_de, flags, "--fdr", "fdr", "FDR threshold (default 0.05)");
    bind_option(label_de, flags, "--lfc", "lfc", "|log2 fold change| threshold (default 0.5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << e.what() << "\n";
        return static_cast<int>(ExitCode::config_error);
    }

    try {
        if (build->parsed()) {
            return cmd_build_benchmark(flags, conditions, zscores, moa_path, bench_out);
        }
        if (probe->parsed()) {
            return cmd_probe(flags, probe_benchmark, probe_out);
        }
        if (run->parsed()) {
            return cmd_run(flags, run_benchmark, run_scores, run_out_dir, run_resume,
                           run_no_history);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(flags, eval_predictions, eval_categories, eval_out, eval_text);
        }
        if (case_study_cmd->parsed()) {
            return cmd_case_study(flags, case_predictions, case_target, case_out, case_text);
        }
        if (label_de->parsed()) {
            return cmd_label_de(flags, de_treated, de_control, de_cells, de_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config_error);
    } catch (const ProviderUnavailable& e) {
        std::cerr << "provider unavailable: " << e.what() << "\n";
        return static_cast<int>(ExitCode::provider_unavailable);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    } catch (const std::exception& e) {
        std::cerr << "run failure: " << e.what() << "\n";
        return static_cast<int>(ExitCode::run_failure);
    }
    return 0;
}
