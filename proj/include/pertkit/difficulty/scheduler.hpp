#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pertkit/agents/types.hpp"
#include "pertkit/gateway/backends.hpp"
#include "pertkit/knowledge/relatedness.hpp"

namespace pertkit::difficulty {

// Composite easiness score for one sample. Higher composite = easier =
// processed earlier.
struct DifficultyScore {
    agents::QuerySpec query;
    double consistency = 0.0;  // majority vote share over probe trials
    double relatedness = 0.0;
    double composite = 0.0;  // consistency * relatedness
    std::vector<std::string> votes;  // upregulated / downregulated / invalid
};

struct ProbeConfig {
    std::string model = "desk-model";
    double temperature = 0.7;
    int max_tokens = 128;
    int trials = 5;
    uint64_t root_seed = 0;
};

struct ProbeResult {
    double consistency = 0.0;
    std::vector<std::string> votes;
    std::string diagnostic;  // set when every trial was unparseable
};

// Issues `trials` single-shot direction queries with distinct seeds and
// returns the majority vote share. Unparseable trials count toward the
// denominator only.
ProbeResult probe_self_consistency(const agents::QuerySpec& query, gateway::ChatBackend& backend,
                                   const ProbeConfig& config);

// Probe consistency times MoA-gene relatedness.
DifficultyScore score_sample(const agents::QuerySpec& query, gateway::ChatBackend& backend,
                             const ProbeConfig& config, const knowledge::MoaTargetMap& map,
                             knowledge::RelatednessSource& source,
                             knowledge::Aggregation mode = knowledge::Aggregation::max);

// Orders by composite descending; ties by gene symbol ascending. Stable.
std::vector<DifficultyScore> sort_easy_first(std::vector<DifficultyScore> scores);

// scores.jsonl round-trip: {cell_line, compound, gene, consistency,
// relatedness, composite, votes[]}.
std::string scores_to_jsonl(const std::vector<DifficultyScore>& scores);
std::vector<DifficultyScore> scores_from_jsonl(const std::string& text,
                                               const std::string& origin);

}  // namespace pertkit::difficulty
