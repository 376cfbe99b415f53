#pragma once

#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pertkit/gateway/chat.hpp"

namespace pertkit::engine {

// Collects the full text of every outgoing request. Wire it through
// gateway::TapBackend; thread safe.
class PromptAuditor {
public:
    void record(const gateway::ChatRequest& req);
    std::vector<std::string> snapshot() const;
    size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> prompts_;
};

struct LeakScanInput {
    std::vector<std::string> prompts;
    // gene -> ground-truth direction word (upregulated/downregulated)
    std::map<std::string, std::string> truth;
    // gene -> direction words the model actually produced for that gene.
    // A direction string attached to a gene in a prompt must be traceable to
    // one of these; anything else can only have come from the label table.
    std::map<std::string, std::set<std::string>> model_outputs;
};

// Returns one message per violation; empty means leak-free. Checks:
//   1. forbidden tokens ("ground truth", "true_label", "label=") never occur;
//   2. a history line "- <gene>: predicted <dir>" with dir equal to the
//      gene's truth is a violation unless the model produced that direction;
//   3. a judge-style "Final Answer: <dir>" in a prompt naming the gene is
//      held to the same rule.
std::vector<std::string> scan_for_leaks(const LeakScanInput& input);

}  // namespace pertkit::engine
