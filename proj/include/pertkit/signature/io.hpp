#pragma once

#include <map>
#include <string>
#include <vector>

#include "pertkit/signature/de.hpp"
#include "pertkit/signature/types.hpp"

namespace pertkit::signature {

struct LoadedConditions {
    std::vector<ConditionSignature> signatures;
    // Rows that could not be used, with a per-row reason.
    std::vector<std::string> diagnostics;
};

// conditions.tsv: condition_id, cell_line, compound, dose_um, time_h,
//                 replicate_count, is_hiq, qc_pass, pert_type
// zscores.tsv:    condition_id, gene, z
LoadedConditions load_conditions(const std::string& conditions_path,
                                 const std::string& zscores_path);

// compound_moa.tsv: compound, moa
std::map<std::string, std::string> load_compound_moa(const std::string& path);

// benchmark.jsonl: one object per item with keys cell_line, compound, moa,
// gene, label, consensus_z, consistency, split.
std::string benchmark_to_jsonl(const std::vector<BenchmarkItem>& items);
std::vector<BenchmarkItem> benchmark_from_jsonl(const std::string& text,
                                                const std::string& origin);
std::vector<BenchmarkItem> load_benchmark(const std::string& path);

// pseudobulk.tsv: cell_line, time_h, n_cells, gene, count
PseudobulkMatrix load_pseudobulk(const std::string& path);

// cells.tsv: group (treated/control), gene, cell_id, value
struct LoadedCells {
    CellExpression treated;
    CellExpression control;
};
LoadedCells load_cells(const std::string& path);

}  // namespace pertkit::signature
