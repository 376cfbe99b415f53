#include "pertkit/agents/prompts.hpp"

#include <cctype>
#include <sstream>

#include "pertkit/common/errors.hpp"

namespace pertkit::agents {

namespace prompts {

const std::string_view context_system = R"__(You are a Cancer Dependency expert. Analyze the genomic landscape of the cell line. Your role is to provide the biological 'ground' for the perturbation.

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "context_reasoning": "...",
  "pathway_activity": "active/inactive/unknown"
}

RULES:
1) Focus on: Basal expression of target/perturb genes and key driver mutations (e.g., BRAF V600E).
2) If the target gene is not expressed, it cannot be downregulated further.
3) Use ONLY biological facts related to the specific cell line.)__";

const std::string_view context_user =
    R"__(Analyze context: Cell Line: {cell_line}, Perturbation: {pert_or_moa}, Target Gene: {target_gene})__";

const std::string_view network_system = R"__(You are a Systems Biology expert. Trace the regulatory path from the perturbation target to the gene of interest.

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "network_reasoning": "Step-by-step pathway reasoning using (Gene)-(rel)->(Entity) format",
  "edge_type": "positive_regulation/negative_regulation/complex"
}

RULES:
1) Trace paths: (PerturbationTarget) -(relationship)-> (Intermediate) -(relationship)-> (TargetGene)
2) Distinguish between 'Activity change' and 'Expression change'.
3) Identify feedback loops or compensatory mechanisms.
4) Use biological knowledge graph's pathway context if provided.)__";

const std::string_view network_user = R"__(Trace the network path:
- Start Point (Perturbation Target): {pert_target}
- End Point (Target Gene): {target_gene}
Is there a known transcriptional or signaling link between these nodes?)__";

const std::string_view mechanism_system = R"__(You are a Molecular Pharmacologist. Define the immediate molecular consequence of the perturbation.

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "mechanism_reasoning": "Direct effect using (Gene)-(rel)->(Entity)",
  "primary_action": "repression/inhibition/activation/etc"
})__";

const std::string_view mechanism_user = R"__(Define the mechanism of action:
- Perturbation: {pert_or_moa}
- Chemical Name (Optional): {drug_name}
- Target Gene: {target_gene}
What is the first biochemical event that happens upon this perturbation?)__";

const std::string_view integration_system = R"__(You are a Molecular Biology Expert. Integrate evidence from Context, Mechanism, and Network agents to predict the target gene mRNA change.

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "reasoning": "Integrated pathway-grounded reasoning",
  "answer": "upregulated/downregulated"
}

DECISION STEPS:
Step 0: Summarize Agent Evidence with pathway notation.
Step 1: Check for direct transcriptional evidence.
Step 2: Justify UP vs DOWN case using (Gene)-(rel)->(Entity).
Step 3: Final decision based on the most anchored path.)__";

const std::string_view integration_user =
    R"__(In {cell_line}, will {target_gene} be upregulated or downregulated by {pert_or_moa}?
[Agent Evidence] Context: {context_reasoning}, Mechanism: {mechanism_reasoning}, Network: {network_reasoning})__";

const std::string_view judge_history_leakage_system = R"__(You are a History Leakage Inspector.
Your ONLY task is to detect whether the reasoning relies on previous history direction labels WITHOUT introducing a new, case-specific justification.
Check ONLY the following:
1) Does the reasoning explicitly or implicitly copy the direction (up/down) from prior cases?
2) Is the final direction justified by perturbation-specific reasoning, or merely by similarity to previous genes?

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "verdict": "problematic" or "not-problematic",
  "feedback": "..."
}

RULES:
- Using history as contextual background is ALLOWED.
- Using history direction as the primary or sole justification is NOT allowed.
- If history leakage is detected, verdict MUST be "problematic".)__";

const std::string_view judge_history_leakage_user = R"__(Previous History Summary: {history_summary}
Canonical Reasoning: {canonical_reasoning}
Counterfactual Reasoning: {counterfactual_reasoning}
Final Reasoning: {final_reasoning}
Final Answer: {final_answer})__";

const std::string_view judge_grounding_system = R"__(You are a Grounding Consistency Inspector.
Your ONLY task is to verify whether the reasoning is properly grounded in the provided biological entities.

Check ONLY:
1) Consistent reference to the given cell line?
2) Correct reference to the perturbation (gene or MoA)?
3) Correct and consistent reference to the target gene?
4) Avoidance of unrelated cell lines, genes, or drugs?

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "verdict": "problematic" or "not-problematic",
  "feedback": "..."
}

RULES:
- Penalize ONLY explicit mismatches or hallucinated entities.
- Do NOT judge biological correctness or the final answer.)__";

const std::string_view judge_grounding_user =
    R"__(Inputs: Cell Line: {cell_line}, Perturbation: {pert_or_moa}, Target Gene: {target_gene}
Canonical Reasoning: {canonical_reasoning}
Counterfactual Reasoning: {counterfactual_reasoning}
Final Reasoning: {final_reasoning}
Final Answer: {final_answer})__";

const std::string_view judge_consistency_system = R"__(You are a Logical Consistency Checker.
Your ONLY task is to verify consistency between the reasoning text and the final answer.

Check ONLY:
1) Does the reasoning argue for upregulation while the answer says downregulated?
2) Does the reasoning argue for downregulation while the answer says upregulated?
3) Is the final answer unsupported or contradicted by the reasoning?

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "verdict": "problematic" or "not-problematic",
  "feedback": "..."
}

RULES:
- Do NOT judge biological validity / grounding / history usage.
- If ANY inconsistency is found, verdict MUST be "problematic".)__";

const std::string_view judge_consistency_user = R"__(Canonical Reasoning: {canonical_reasoning}
Counterfactual Reasoning: {counterfactual_reasoning}
Final Reasoning: {final_reasoning}
Final Answer: {final_answer}
Is the reasoning logically consistent with the answer?)__";

const std::string_view probe_system = R"__(You are a biology assistant. Predict the direction of the target gene's expression change under the given perturbation.

OUTPUT FORMAT (STRICT - JSON ONLY):
{
  "answer": "upregulated/downregulated"
})__";

const std::string_view probe_user = R"__(Cell Line: {cell_line}
Perturbation: {pert_or_moa}
Target Gene: {target_gene}
Will the target gene be upregulated or downregulated?)__";

}  // namespace prompts

std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    size_t i = 0;
    while (i < tmpl.size()) {
        const char c = tmpl[i];
        if (c != '{') {
            out += c;
            ++i;
            continue;
        }
        size_t j = i + 1;
        while (j < tmpl.size() && (std::islower(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
            ++j;
        }
        if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
            const std::string key(tmpl.substr(i + 1, j - i - 1));
            auto it = values.find(key);
            if (it == values.end()) {
                throw InputError("prompt template placeholder '{" + key + "}' has no value");
            }
            out += it->second;
            i = j + 1;
            continue;
        }
        out += c;  // literal brace (JSON examples etc.)
        ++i;
    }
    return out;
}

std::string format_history_block(std::span<const HistoryItem> items) {
    if (items.empty()) {
        return "";
    }
    std::ostringstream out;
    out << "[Prior Reasoning]";
    for (const auto& item : items) {
        out << "\n- " << item.gene << ": predicted " << item.predicted_label;
        if (!item.summary.empty()) {
            out << " :: " << item.summary;
        }
    }
    return out.str();
}

}  // namespace pertkit::agents
