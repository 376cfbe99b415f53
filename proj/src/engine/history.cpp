#include "pertkit/engine/history.hpp"

#include <algorithm>
#include <numeric>

namespace pertkit::engine {

std::vector<HistoryEntry> curate_history(std::span<const HistoryEntry> entries,
                                         const std::string& current_gene, int cap,
                                         knowledge::RelatednessSource& source,
                                         bool include_unverified) {
    if (cap <= 0) {
        return {};
    }
    struct Ranked {
        size_t index;
        double relatedness;
    };
    std::vector<Ranked> ranked;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].verified && !include_unverified) {
            continue;
        }
        ranked.push_back({i, knowledge::gene_gene(entries[i].gene, current_gene, source).score});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.relatedness != b.relatedness) {
            return a.relatedness > b.relatedness;
        }
        return a.index > b.index;  // newer first on ties
    });
    std::vector<HistoryEntry> out;
    for (const auto& r : ranked) {
        if (static_cast<int>(out.size()) >= cap) {
            break;
        }
        out.push_back(entries[r.index]);
    }
    return out;
}

std::string summarize_reasoning(const std::string& reasoning, size_t char_cap) {
    if (reasoning.size() <= char_cap) {
        return reasoning;
    }
    return reasoning.substr(0, char_cap);
}

}  // namespace pertkit::engine
