#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pertkit::evalsuite {

struct PredictionRecord {
    std::string cell_line;
    std::string compound;
    std::string moa;
    std::string gene;
    double score = 0.0;  // [0, 1], upregulated vote share
    std::string predicted_label;  // upregulated / downregulated
    std::optional<int> true_label; // 1 = up, 0 = down
    int run_id = 0;
    std::string category;  // attached when a category map is applied
};

// Probability that a uniformly random positive outscores a random negative,
// ties counted one half. Returns nullopt when only one class is present.
std::optional<double> auroc(std::span<const PredictionRecord> records);

struct RunAggregate {
    double mean = 0.0;
    double std_dev = 0.0;  // sample (n-1) estimator; 0 for a single run
    int runs = 0;
};

RunAggregate aggregate_runs(std::span<const double> per_run_values);

// Fraction of records whose predicted label matches the true label.
// Records without a true label are excluded from both counts.
double agreement_ratio(std::span<const PredictionRecord> records);

// Cell-line specificity metrics over per-cell agreement ratios.
// target_rank: 1 + number of non-target cells with strictly greater ratio.
int target_rank(const std::map<std::string, double>& ratios, const std::string& target);

// r_target minus the mean ratio over all cells (target included).
double mean_gap(const std::map<std::string, double>& ratios, const std::string& target);

// 100 * mean_gap / mean; nullopt when the mean is zero.
std::optional<double> relative_dominance(const std::map<std::string, double>& ratios,
                                         const std::string& target);

struct SpecificityReport {
    std::string drug;
    std::map<std::string, double> ratios;
    std::string target_cell;
    int target_rank = 0;
    double mean_gap = 0.0;
    std::optional<double> relative_dominance_pct;
};

// Builds the report and verifies the dominance identity
// (dominance == 100 * gap / mean) to 1e-9 before returning.
SpecificityReport build_specificity_report(const std::string& drug,
                                           const std::map<std::string, double>& ratios,
                                           const std::string& target);

// predictions.jsonl round-trip.
std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> predictions_from_jsonl(const std::string& text,
                                                     const std::string& origin);
std::vector<PredictionRecord> load_predictions(const std::string& path);

// celline_categories.tsv: cell_line, category.
std::map<std::string, std::string> load_categories(const std::string& path);

}  // namespace pertkit::evalsuite
