#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pertkit/agents/ensemble.hpp"
#include "pertkit/engine/history.hpp"
#include "pertkit/engine/trace.hpp"
#include "pertkit/knowledge/relatedness.hpp"

namespace pertkit::engine {

struct ContextItem {
    agents::QuerySpec query;
    double composite = 0.0;  // difficulty composite the order came from
};

// One (cell line, compound) loop. Items must already be in processing
// order; the engine never reorders them.
struct ContextTask {
    std::string cell_line;
    std::string compound;
    std::string moa;
    std::vector<ContextItem> items;

    // Filesystem-safe identifier, unique per (cell line, compound).
    std::string id() const;
};

struct EngineConfig {
    int history_cap = 5;           // H
    int summary_char_cap = 600;
    bool include_unverified = false;
    int workers = 1;
    std::string state_dir;  // empty disables checkpointing
    std::string config_hash;
};

struct ContextResult {
    std::string context_id;
    std::vector<TraceRecord> traces;  // processing order
};

// Drives the per-context easy-to-hard loops. Contexts may run in parallel up
// to the worker cap; within a context the loop is strictly sequential (the
// history dependency is the point). Results always come back sorted by
// context id, so output bytes do not depend on scheduling.
class ProgressiveRunner {
public:
    ProgressiveRunner(agents::AgentEnsemble& ensemble, knowledge::RelatednessSource& source,
                      EngineConfig config);

    // Called after each persisted sample; tests use it to simulate crashes.
    std::function<void(const std::string& context_id, size_t completed)> after_sample;

    std::vector<ContextResult> run(const std::vector<ContextTask>& tasks, bool resume);

    // Single-context loop, exposed for tests.
    ContextResult run_context(const ContextTask& task, bool resume);

private:
    agents::AgentEnsemble& ensemble_;
    knowledge::RelatednessSource& source_;
    EngineConfig config_;

    std::string state_path(const ContextTask& task) const;
    void persist(const ContextTask& task, const std::vector<TraceRecord>& completed) const;
    std::vector<TraceRecord> load_completed(const ContextTask& task) const;
};

// Flattens per-context results (already sorted) into traces.jsonl text.
std::string merge_traces(const std::vector<ContextResult>& results);

}  // namespace pertkit::engine
