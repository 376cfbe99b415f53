#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pertkit/evalsuite/metrics.hpp"

namespace pertkit::evalsuite {

enum class AurocMode {
    pooled,           // pool a category's records per run, AUROC per run
    per_perturbation  // AUROC per (cell, compound) context, stats across contexts
};

struct CategoryResult {
    std::string category;
    int n_records = 0;
    int n_positive = 0;
    int n_negative = 0;
    RunAggregate auroc;
    bool defined = true;
    std::string note;  // e.g. single-class categories
};

struct EvalReport {
    AurocMode mode = AurocMode::pooled;
    std::vector<CategoryResult> categories;
    // Mean over defined categories of their AUROC means.
    std::optional<double> overall_mean;
};

// Attaches categories from the cell-line map; unmapped cell lines fall into
// "uncategorized".
std::vector<PredictionRecord> apply_categories(std::vector<PredictionRecord> records,
                                               const std::map<std::string, std::string>& map);

EvalReport evaluate(const std::vector<PredictionRecord>& records, AurocMode mode);

std::string report_to_json(const EvalReport& report);
// Aligned text table: one row per category, mean +/- std columns.
std::string report_to_text(const EvalReport& report);

std::string specificity_to_json(const std::vector<SpecificityReport>& reports);
std::string specificity_to_text(const std::vector<SpecificityReport>& reports);

// Groups labeled predictions for one drug by cell line and computes agreement
// ratios; one report per compound present in `records`.
std::vector<SpecificityReport> case_study(const std::vector<PredictionRecord>& records,
                                          const std::string& target_cell);

}  // namespace pertkit::evalsuite
