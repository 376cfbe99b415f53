#pragma once

#include <span>
#include <string>
#include <vector>

#include "pertkit/knowledge/relatedness.hpp"

namespace pertkit::engine {

// One completed prediction, reusable as context for later samples in the
// same (cell line, compound) loop. Never carries a ground-truth label.
struct HistoryEntry {
    std::string gene;
    std::string predicted_label;     // upregulated / downregulated
    std::string reasoning_summary;   // integration reasoning, truncated
    double composite_at_prediction = 0.0;
    bool verified = false;
};

// Selects up to `cap` entries ranked by gene-gene relatedness to the current
// gene (descending), ties broken by recency (newer first). Only verified
// entries are eligible unless include_unverified is set.
std::vector<HistoryEntry> curate_history(std::span<const HistoryEntry> entries,
                                         const std::string& current_gene, int cap,
                                         knowledge::RelatednessSource& source,
                                         bool include_unverified = false);

// Truncates a reasoning text to the configured summary cap.
std::string summarize_reasoning(const std::string& reasoning, size_t char_cap);

}  // namespace pertkit::engine
