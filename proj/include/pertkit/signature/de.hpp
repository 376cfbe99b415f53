#pragma once

#include <map>
#include <string>
#include <vector>

#include "pertkit/signature/types.hpp"

namespace pertkit::signature {

enum class DeLabel { up, down, unchanged };

inline std::string to_string(DeLabel l) {
    switch (l) {
        case DeLabel::up: return "up";
        case DeLabel::down: return "down";
        default: return "unchanged";
    }
}

struct DeGene {
    DeLabel label = DeLabel::unchanged;
    double p_value = 1.0;
    double q_value = 1.0;
    double log2_fc = 0.0;
};

struct DeResult {
    std::map<std::string, DeGene> genes;
    // Genes that could not be tested, with the reason.
    std::vector<std::pair<std::string, std::string>> skipped;
};

// Per-cell expression values for each gene, one vector per gene.
using CellExpression = std::map<std::string, std::vector<double>>;

// Labels differential expression between a treated and a control population.
// Per gene: two-sided Mann-Whitney U p-value over per-cell values, BH
// adjustment across all tested genes, then up/down iff q < fdr and
// |log2 fold change| > lfc. The fold change comes from the pseudobulk
// per-cell means with a pseudocount of 1 on both sides; its sign sets the
// direction. Genes with fewer than two observations on either side are
// skipped with a diagnostic.
DeResult label_pseudobulk_de(const PseudobulkMatrix& treated, const PseudobulkMatrix& control,
                             const CellExpression& cells_treated,
                             const CellExpression& cells_control, double fdr = 0.05,
                             double lfc = 0.5);

}  // namespace pertkit::signature
