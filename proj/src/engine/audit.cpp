#include "pertkit/engine/audit.hpp"

#include <algorithm>

namespace pertkit::engine {

void PromptAuditor::record(const gateway::ChatRequest& req) {
    std::string text;
    for (const auto& m : req.messages) {
        text += to_string(m.role) + ":\n" + m.content + "\n";
    }
    std::lock_guard lock(mutex_);
    prompts_.push_back(std::move(text));
}

std::vector<std::string> PromptAuditor::snapshot() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

size_t PromptAuditor::size() const {
    std::lock_guard lock(mutex_);
    return prompts_.size();
}

namespace {

bool contains_ci(const std::string& haystack, const std::string& needle) {
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    return it != haystack.end();
}

bool allowed_output(const LeakScanInput& input, const std::string& gene,
                    const std::string& dir) {
    auto it = input.model_outputs.find(gene);
    return it != input.model_outputs.end() && it->second.count(dir) > 0;
}

}  // namespace

std::vector<std::string> scan_for_leaks(const LeakScanInput& input) {
    std::vector<std::string> violations;
    static const std::vector<std::string> forbidden = {"ground truth", "ground_truth",
                                                       "true_label", "label="};

    for (size_t p = 0; p < input.prompts.size(); ++p) {
        const std::string& prompt = input.prompts[p];
        const std::string where = "prompt #" + std::to_string(p);

        for (const auto& token : forbidden) {
            if (contains_ci(prompt, token)) {
                violations.push_back(where + ": contains forbidden token '" + token + "'");
            }
        }

        for (const auto& [gene, truth_dir] : input.truth) {
            if (allowed_output(input, gene, truth_dir)) {
                continue;  // the model itself said this; not a leak
            }
            const std::string history_pattern = "- " + gene + ": predicted " + truth_dir;
            if (prompt.find(history_pattern) != std::string::npos) {
                violations.push_back(where + ": history line pairs gene '" + gene +
                                     "' with its ground-truth direction");
            }
            const bool names_gene =
                prompt.find("Target Gene: " + gene) != std::string::npos ||
                prompt.find(", will " + gene + " be ") != std::string::npos;
            if (names_gene &&
                prompt.find("Final Answer: " + truth_dir) != std::string::npos) {
                violations.push_back(where + ": final answer for gene '" + gene +
                                     "' equals its ground-truth direction");
            }
        }
    }
    return violations;
}

}  // namespace pertkit::engine
