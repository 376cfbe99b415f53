#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "pertkit/gateway/backends.hpp"

namespace pertkit::gateway {

// Configuration of the synthetic answer model. Truth is keyed by
// "cell_line|perturbation|gene". Hard samples answer correctly with
// base_accuracy_hard; supplying at least one correct related history entry
// raises that by context_boost. Every response is a pure function of
// (rng_seed, canonical request hash), so replies do not depend on arrival
// order.
struct OracleWorld {
    std::unordered_map<std::string, std::string> truth;  // key -> upregulated/downregulated
    std::unordered_set<std::string> hard;
    double base_accuracy_easy = 0.9;
    double base_accuracy_hard = 0.55;
    double context_boost = 0.0;
    double judge_problematic_rate = 0.0;
    uint64_t rng_seed = 0;
    // Related gene pairs (unordered). Empty set means any correct history
    // entry counts as related.
    std::set<std::pair<std::string, std::string>> relations;

    static std::string key(const std::string& cell, const std::string& pert,
                           const std::string& gene);

    bool related(const std::string& a, const std::string& b) const;

    static OracleWorld load(const std::string& path);
    std::string to_json() const;
};

// Deterministic synthetic model. Classifies each request by the role markers
// in its system prompt (probe, expert, integration, judge) and answers in
// the matching strict-JSON format.
class OracleBackend final : public ChatBackend {
public:
    explicit OracleBackend(OracleWorld world) : world_(std::move(world)) {}

    ChatResponse complete(const ChatRequest& req) override;

    const OracleWorld& world() const { return world_; }

private:
    OracleWorld world_;
};

}  // namespace pertkit::gateway
