#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pertkit/agents/prompts.hpp"
#include "pertkit/agents/types.hpp"
#include "pertkit/gateway/backends.hpp"
#include "pertkit/knowledge/relatedness.hpp"

namespace pertkit::agents {

struct EnsembleConfig {
    std::string model = "desk-model";
    double temperature = 0.7;
    int max_tokens = 768;
    int max_retries = 3;   // retry budget of the judge gate
    int k_samples = 5;     // repetitions behind the vote-share score
    bool judge4_enabled = true;
    uint64_t root_seed = 0;
};

// The three experts, the integration agent and the judge gate. One instance
// serves many samples; all methods are const apart from backend traffic.
class AgentEnsemble {
public:
    AgentEnsemble(gateway::ChatBackend& backend, const knowledge::MoaTargetMap* moa_targets,
                  EnsembleConfig config);

    // Invokes the three experts independently. A malformed expert reply
    // marks that expert failed; the others are unaffected.
    std::vector<ExpertOutput> run_experts(const QuerySpec& query,
                                          const std::string& history_block) const;

    // One integration call. Throws gateway::MalformedOutput when no valid
    // JSON can be extracted (the judge loop turns that into a retry).
    IntegrationOutput integrate(const QuerySpec& query, const std::vector<ExpertOutput>& experts,
                                const std::string& history_block,
                                const std::optional<NeuralPrior>& prior,
                                const std::string& feedback_block, uint64_t seed) const;

    // Integration + all enabled judges, retried until every judge returns
    // not-problematic or the budget runs out. On exhaustion the attempt with
    // the smallest problematic count comes back flagged unverified.
    GatedResult judge_gate(const QuerySpec& query, const std::vector<ExpertOutput>& experts,
                           const std::string& history_block,
                           const std::optional<NeuralPrior>& prior, int repetition) const;

    // Full pipeline for one sample: experts once, then k_samples gated
    // repetitions; score is the upregulated vote share.
    ReasoningTrace predict(const QuerySpec& query, std::vector<HistoryItem> history,
                           const std::optional<NeuralPrior>& prior = std::nullopt) const;

    // Number of judge slots under the current configuration (3 or 4).
    int judge_count() const { return config_.judge4_enabled ? 4 : 3; }

    const EnsembleConfig& config() const { return config_; }

private:
    gateway::ChatBackend& backend_;
    const knowledge::MoaTargetMap* moa_targets_;  // may be null
    EnsembleConfig config_;

    std::string pert_target_for(const QuerySpec& query) const;
    JudgeVerdict run_judge(int judge_id, const QuerySpec& query,
                           const IntegrationOutput& integration,
                           const std::string& history_block, int repetition, int attempt) const;
};

}  // namespace pertkit::agents
