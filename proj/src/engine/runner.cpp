#include "pertkit/engine/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/hash.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::engine {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string ContextTask::id() const {
    std::string slug;
    for (char c : cell_line + "_" + compound) {
        slug += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    }
    // Short hash keeps distinct pairs distinct after slugging.
    return slug + "_" + to_hex64(fnv64(cell_line + "|" + compound)).substr(0, 8);
}

ProgressiveRunner::ProgressiveRunner(agents::AgentEnsemble& ensemble,
                                     knowledge::RelatednessSource& source, EngineConfig config)
    : ensemble_(ensemble), source_(source), config_(std::move(config)) {}

std::string ProgressiveRunner::state_path(const ContextTask& task) const {
    return config_.state_dir + "/" + task.id() + ".json";
}

void ProgressiveRunner::persist(const ContextTask& task,
                                const std::vector<TraceRecord>& completed) const {
    if (config_.state_dir.empty()) {
        return;
    }
    fs::create_directories(config_.state_dir);

    ordered_json j;
    j["context_id"] = task.id();
    j["cell_line"] = task.cell_line;
    j["compound"] = task.compound;
    j["moa"] = task.moa;
    j["config_hash"] = config_.config_hash;
    j["pending"] = ordered_json::array();
    for (size_t i = completed.size(); i < task.items.size(); ++i) {
        j["pending"].push_back(task.items[i].query.gene);
    }
    j["completed"] = ordered_json::array();
    for (const auto& record : completed) {
        j["completed"].push_back(trace_to_json(record));
    }

    const std::string path = state_path(task);
    const std::string tmp = path + ".tmp";
    write_text_file(tmp, j.dump());
    fs::rename(tmp, path);
}

std::vector<TraceRecord> ProgressiveRunner::load_completed(const ContextTask& task) const {
    const std::string path = state_path(task);
    if (config_.state_dir.empty() || !fs::exists(path)) {
        return {};
    }
    ordered_json j = ordered_json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InputError(path + ": malformed run state");
    }
    const std::string stored_hash = j.value("config_hash", "");
    if (stored_hash != config_.config_hash) {
        throw ConfigError("refusing to resume context '" + task.id() +
                          "': config hash mismatch (state " + stored_hash + ", current " +
                          config_.config_hash + ")");
    }
    std::vector<TraceRecord> completed;
    for (const auto& tj : j.at("completed")) {
        completed.push_back(trace_from_json(tj));
    }
    // The checkpoint must be a prefix of the task's processing order.
    if (completed.size() > task.items.size()) {
        throw InputError(path + ": more completed traces than samples in context");
    }
    for (size_t i = 0; i < completed.size(); ++i) {
        if (completed[i].trace.query.gene != task.items[i].query.gene) {
            throw InputError(path + ": completed trace order does not match the schedule (gene '" +
                             completed[i].trace.query.gene + "' vs '" +
                             task.items[i].query.gene + "')");
        }
    }
    return completed;
}

ContextResult ProgressiveRunner::run_context(const ContextTask& task, bool resume) {
    ContextResult result;
    result.context_id = task.id();

    std::vector<TraceRecord> completed;
    if (resume) {
        completed = load_completed(task);
    }

    // Rebuild history from already-completed traces.
    std::vector<HistoryEntry> history;
    for (const auto& record : completed) {
        if (record.trace.final_answer.empty()) {
            continue;
        }
        HistoryEntry entry;
        entry.gene = record.trace.query.gene;
        entry.predicted_label = record.trace.final_answer;
        entry.reasoning_summary = summarize_reasoning(record.trace.gated.integration.reasoning,
                                                      config_.summary_char_cap);
        entry.composite_at_prediction = record.composite;
        entry.verified = record.trace.verified;
        history.push_back(std::move(entry));
    }

    for (size_t i = completed.size(); i < task.items.size(); ++i) {
        const ContextItem& item = task.items[i];
        const std::vector<HistoryEntry> curated = curate_history(
            history, item.query.gene, config_.history_cap, source_, config_.include_unverified);
        std::vector<agents::HistoryItem> prompt_history;
        prompt_history.reserve(curated.size());
        for (const auto& e : curated) {
            prompt_history.push_back({e.gene, e.predicted_label, e.reasoning_summary});
        }

        TraceRecord record;
        record.composite = item.composite;
        try {
            record.trace = ensemble_.predict(item.query, std::move(prompt_history));
        } catch (const std::exception& e) {
            persist(task, completed);
            throw RunFailure("context '" + task.id() + "', gene '" + item.query.gene +
                             "': " + e.what());
        }

        completed.push_back(std::move(record));
        persist(task, completed);

        const TraceRecord& done = completed.back();
        if (!done.trace.final_answer.empty()) {
            HistoryEntry entry;
            entry.gene = done.trace.query.gene;
            entry.predicted_label = done.trace.final_answer;
            entry.reasoning_summary = summarize_reasoning(done.trace.gated.integration.reasoning,
                                                          config_.summary_char_cap);
            entry.composite_at_prediction = done.composite;
            entry.verified = done.trace.verified;
            history.push_back(std::move(entry));
        }
        if (after_sample) {
            after_sample(result.context_id, completed.size());
        }
    }

    result.traces = std::move(completed);
    return result;
}

std::vector<ContextResult> ProgressiveRunner::run(const std::vector<ContextTask>& tasks,
                                                  bool resume) {
    // Canonical context order; output bytes never depend on worker timing.
    std::vector<size_t> order(tasks.size());
    for (size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return tasks[a].id() < tasks[b].id();
    });

    std::vector<ContextResult> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<size_t> next{0};

    const int workers = std::max(1, std::min<int>(config_.workers,
                                                  static_cast<int>(tasks.size())));
    auto worker = [&]() {
        while (true) {
            const size_t slot = next.fetch_add(1);
            if (slot >= order.size()) {
                return;
            }
            const size_t task_index = order[slot];
            try {
                results[slot] = run_context(tasks[task_index], resume);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // Rethrow the first failure in canonical context order; the error type
    // (config vs run failure) stays intact for the caller's exit code.
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
    return results;
}

std::string merge_traces(const std::vector<ContextResult>& results) {
    std::string out;
    for (const auto& r : results) {
        for (const auto& record : r.traces) {
            out += trace_to_json(record).dump();
            out += '\n';
        }
    }
    return out;
}

}  // namespace pertkit::engine
