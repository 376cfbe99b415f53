#include "pertkit/evalsuite/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/tsv.hpp"
#include "pertkit/signature/stats.hpp"

namespace pertkit::evalsuite {

using ordered_json = nlohmann::ordered_json;

std::optional<double> auroc(std::span<const PredictionRecord> records) {
    std::vector<double> scores;
    std::vector<bool> positive;
    scores.reserve(records.size());
    for (const auto& r : records) {
        if (!r.true_label) {
            continue;
        }
        scores.push_back(r.score);
        positive.push_back(*r.true_label == 1);
    }
    const long long pos = std::count(positive.begin(), positive.end(), true);
    const long long neg = static_cast<long long>(positive.size()) - pos;
    if (pos == 0 || neg == 0) {
        return std::nullopt;
    }
    // Mann-Whitney formulation via mid-ranks: U = R_pos - P(P+1)/2.
    const std::vector<double> ranks = signature::midranks(scores);
    double rank_sum_pos = 0.0;
    for (size_t i = 0; i < ranks.size(); ++i) {
        if (positive[i]) {
            rank_sum_pos += ranks[i];
        }
    }
    const double u = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

RunAggregate aggregate_runs(std::span<const double> per_run_values) {
    RunAggregate agg;
    agg.runs = static_cast<int>(per_run_values.size());
    if (per_run_values.empty()) {
        return agg;
    }
    agg.mean = std::accumulate(per_run_values.begin(), per_run_values.end(), 0.0) /
               static_cast<double>(per_run_values.size());
    if (per_run_values.size() < 2) {
        agg.std_dev = 0.0;  // single run: 0 by convention
        return agg;
    }
    double ss = 0.0;
    for (double v : per_run_values) {
        ss += (v - agg.mean) * (v - agg.mean);
    }
    agg.std_dev = std::sqrt(ss / static_cast<double>(per_run_values.size() - 1));
    return agg;
}

double agreement_ratio(std::span<const PredictionRecord> records) {
    long long total = 0;
    long long correct = 0;
    for (const auto& r : records) {
        if (!r.true_label) {
            continue;
        }
        ++total;
        const std::string truth = *r.true_label == 1 ? "upregulated" : "downregulated";
        if (r.predicted_label == truth) {
            ++correct;
        }
    }
    if (total == 0) {
        throw InputError("agreement_ratio: no labeled records");
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

double require_target(const std::map<std::string, double>& ratios, const std::string& target) {
    auto it = ratios.find(target);
    if (it == ratios.end()) {
        throw InputError("target cell line '" + target + "' has no agreement ratio");
    }
    return it->second;
}

double ratios_mean(const std::map<std::string, double>& ratios) {
    if (ratios.empty()) {
        throw InputError("no agreement ratios");
    }
    double sum = 0.0;
    for (const auto& [_, r] : ratios) {
        sum += r;
    }
    return sum / static_cast<double>(ratios.size());
}

}  // namespace

int target_rank(const std::map<std::string, double>& ratios, const std::string& target) {
    const double r_target = require_target(ratios, target);
    int rank = 1;
    for (const auto& [cell, r] : ratios) {
        if (cell != target && r > r_target) {
            ++rank;  // strict inequality: ties do not increment
        }
    }
    return rank;
}

double mean_gap(const std::map<std::string, double>& ratios, const std::string& target) {
    return require_target(ratios, target) - ratios_mean(ratios);
}

std::optional<double> relative_dominance(const std::map<std::string, double>& ratios,
                                         const std::string& target) {
    const double mean = ratios_mean(ratios);
    if (mean == 0.0) {
        return std::nullopt;
    }
    return 100.0 * mean_gap(ratios, target) / mean;
}

SpecificityReport build_specificity_report(const std::string& drug,
                                           const std::map<std::string, double>& ratios,
                                           const std::string& target) {
    SpecificityReport report;
    report.drug = drug;
    report.ratios = ratios;
    report.target_cell = target;
    report.target_rank = target_rank(ratios, target);
    report.mean_gap = mean_gap(ratios, target);
    report.relative_dominance_pct = relative_dominance(ratios, target);
    if (report.relative_dominance_pct) {
        // Internal identity: dominance must equal 100*gap/mean exactly.
        const double mean = ratios_mean(ratios);
        const double recomputed = 100.0 * report.mean_gap / mean;
        if (std::fabs(recomputed - *report.relative_dominance_pct) > 1e-9) {
            throw RunFailure("specificity report identity violated for drug '" + drug + "'");
        }
    }
    return report;
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records) {
    std::ostringstream out;
    for (const auto& r : records) {
        ordered_json j;
        j["cell_line"] = r.cell_line;
        j["compound"] = r.compound;
        j["moa"] = r.moa;
        j["gene"] = r.gene;
        j["score"] = r.score;
        j["predicted_label"] = r.predicted_label;
        if (r.true_label) {
            j["true_label"] = *r.true_label;
        } else {
            j["true_label"] = nullptr;
        }
        j["run_id"] = r.run_id;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<PredictionRecord> predictions_from_jsonl(const std::string& text,
                                                     const std::string& origin) {
    std::vector<PredictionRecord> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": malformed JSON line");
        }
        try {
            PredictionRecord r;
            r.cell_line = j.at("cell_line").get<std::string>();
            r.compound = j.at("compound").get<std::string>();
            r.moa = j.value("moa", "");
            r.gene = j.at("gene").get<std::string>();
            r.score = j.at("score").get<double>();
            r.predicted_label = j.at("predicted_label").get<std::string>();
            if (j.contains("true_label") && !j["true_label"].is_null()) {
                r.true_label = j["true_label"].get<int>();
            }
            r.run_id = j.value("run_id", 0);
            if (r.score < 0.0 || r.score > 1.0) {
                throw InputError(origin + ":" + std::to_string(lineno) +
                                 ": score outside [0, 1]");
            }
            out.push_back(std::move(r));
        } catch (const ordered_json::exception& e) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
    return predictions_from_jsonl(read_text_file(path), path);
}

std::map<std::string, std::string> load_categories(const std::string& path) {
    const TsvTable t = TsvTable::read_file(path);
    std::map<std::string, std::string> out;
    for (size_t r = 0; r < t.row_count(); ++r) {
        out[t.cell(r, "cell_line")] = t.cell(r, "category");
    }
    return out;
}

}  // namespace pertkit::evalsuite
