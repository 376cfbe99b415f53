#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pertkit::agents {

// Everything the agents may see about a sample. Deliberately label-free:
// ground truth is stripped before any prompt-filling call.
struct QuerySpec {
    std::string cell_line;
    std::string compound;  // drug name, may be empty
    std::string moa;       // perturbation presented to the agents
    std::string gene;

    std::string key() const { return cell_line + "|" + moa + "|" + gene; }
};

enum class ExpertKind { context, mechanism, network };

inline std::string to_string(ExpertKind k) {
    switch (k) {
        case ExpertKind::context: return "context";
        case ExpertKind::mechanism: return "mechanism";
        default: return "network";
    }
}

struct ExpertOutput {
    ExpertKind kind = ExpertKind::context;
    std::string reasoning;
    std::string tag;  // pathway_activity / primary_action / edge_type
    bool failed = false;
};

struct IntegrationOutput {
    std::string reasoning;
    std::string answer;  // upregulated / downregulated
    std::string canonical_reasoning;
    std::optional<std::string> counterfactual_reasoning;  // present iff a prior was attached
};

struct JudgeVerdict {
    int judge_id = 0;  // 1..4
    bool problematic = false;
    std::string feedback;
};

// Optional hook for an external model's opinion; interface only.
struct NeuralPrior {
    std::string predicted_label;
    double confidence = 0.0;  // [0, 1]
};

// Result of one integration + judge loop.
struct GatedResult {
    IntegrationOutput integration;
    std::vector<JudgeVerdict> verdicts;  // verdicts of the returned attempt
    int retries = 0;
    bool verified = false;  // m == 0 on some attempt within the retry budget
    int problem_count = 0;  // m of the returned attempt
};

// Full per-sample outcome: experts, the representative gated repetition, and
// the vote-share score over k repetitions.
struct ReasoningTrace {
    QuerySpec query;
    std::vector<ExpertOutput> experts;
    GatedResult gated;
    std::vector<std::string> votes;  // per-repetition final answers; "invalid" when unparseable
    double score = 0.0;              // fraction of repetitions answering upregulated
    std::string final_answer;        // majority label, ties up
    bool verified = false;           // every repetition accepted
    std::vector<std::string> history_genes;
};

}  // namespace pertkit::agents
