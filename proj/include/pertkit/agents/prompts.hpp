#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pertkit::agents {

// Versioned prompt assets. Placeholders use {name} syntax and are replaced
// by fill(); brace runs that do not look like a placeholder (e.g. the JSON
// examples inside OUTPUT FORMAT blocks) pass through untouched.
inline constexpr std::string_view kPromptsVersion = "1";

namespace prompts {

extern const std::string_view context_system;
extern const std::string_view context_user;
extern const std::string_view network_system;
extern const std::string_view network_user;
extern const std::string_view mechanism_system;
extern const std::string_view mechanism_user;
extern const std::string_view integration_system;
extern const std::string_view integration_user;
extern const std::string_view judge_history_leakage_system;
extern const std::string_view judge_history_leakage_user;
extern const std::string_view judge_grounding_system;
extern const std::string_view judge_grounding_user;
extern const std::string_view judge_consistency_system;
extern const std::string_view judge_consistency_user;
extern const std::string_view probe_system;
extern const std::string_view probe_user;

}  // namespace prompts

// Replaces every {placeholder} whose key exists in `values`. A placeholder
// with no matching key raises InputError (it catches template drift).
std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct HistoryItem {
    std::string gene;
    std::string predicted_label;  // upregulated / downregulated
    std::string summary;
};

// Renders the curated prior-reasoning block appended to expert and
// integration prompts. Lines follow "- <gene>: predicted <direction> ::
// <summary>"; the same shape is what the leak scanner and the synthetic
// backend parse. Empty input renders an empty string.
std::string format_history_block(std::span<const HistoryItem> items);

}  // namespace pertkit::agents
