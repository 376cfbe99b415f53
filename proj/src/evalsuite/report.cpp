#include "pertkit/evalsuite/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/common/errors.hpp"

namespace pertkit::evalsuite {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fixed1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string pad(const std::string& s, size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::vector<PredictionRecord> apply_categories(std::vector<PredictionRecord> records,
                                               const std::map<std::string, std::string>& map) {
    for (auto& r : records) {
        auto it = map.find(r.cell_line);
        r.category = it == map.end() ? "uncategorized" : it->second;
    }
    return records;
}

EvalReport evaluate(const std::vector<PredictionRecord>& records, AurocMode mode) {
    EvalReport report;
    report.mode = mode;

    std::map<std::string, std::vector<PredictionRecord>> by_category;
    for (const auto& r : records) {
        if (!r.true_label) {
            continue;  // unlabeled records cannot enter AUROC
        }
        by_category[r.category.empty() ? "uncategorized" : r.category].push_back(r);
    }

    for (const auto& [category, recs] : by_category) {
        CategoryResult result;
        result.category = category;
        result.n_records = static_cast<int>(recs.size());
        for (const auto& r : recs) {
            (*r.true_label == 1 ? result.n_positive : result.n_negative) += 1;
        }

        std::vector<double> values;
        if (mode == AurocMode::pooled) {
            std::map<int, std::vector<PredictionRecord>> by_run;
            for (const auto& r : recs) {
                by_run[r.run_id].push_back(r);
            }
            for (const auto& [run, run_recs] : by_run) {
                if (const auto v = auroc(run_recs)) {
                    values.push_back(*v);
                }
            }
        } else {
            std::map<std::pair<std::string, std::string>, std::vector<PredictionRecord>> by_ctx;
            for (const auto& r : recs) {
                by_ctx[{r.cell_line, r.compound}].push_back(r);
            }
            for (const auto& [ctx, ctx_recs] : by_ctx) {
                if (const auto v = auroc(ctx_recs)) {
                    values.push_back(*v);
                }
            }
        }

        if (values.empty()) {
            result.defined = false;
            result.note = "undefined: single-class category, excluded from the mean";
        } else {
            result.auroc = aggregate_runs(values);
        }
        report.categories.push_back(std::move(result));
    }

    double sum = 0.0;
    int defined = 0;
    for (const auto& c : report.categories) {
        if (c.defined) {
            sum += c.auroc.mean;
            ++defined;
        }
    }
    if (defined > 0) {
        report.overall_mean = sum / defined;
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    ordered_json j;
    j["mode"] = report.mode == AurocMode::pooled ? "pooled" : "per_perturbation";
    j["categories"] = ordered_json::array();
    for (const auto& c : report.categories) {
        ordered_json cj;
        cj["category"] = c.category;
        cj["n_records"] = c.n_records;
        cj["n_positive"] = c.n_positive;
        cj["n_negative"] = c.n_negative;
        if (c.defined) {
            cj["auroc_mean"] = c.auroc.mean;
            cj["auroc_std"] = c.auroc.std_dev;
            cj["n_values"] = c.auroc.runs;
        } else {
            cj["auroc_mean"] = nullptr;
            cj["note"] = c.note;
        }
        j["categories"].push_back(std::move(cj));
    }
    if (report.overall_mean) {
        j["overall_mean"] = *report.overall_mean;
    } else {
        j["overall_mean"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
    size_t name_width = 8;
    for (const auto& c : report.categories) {
        name_width = std::max(name_width, c.category.size());
    }
    std::ostringstream out;
    out << pad("Category", name_width + 2) << pad("AUROC (mean +/- std)", 24)
        << pad("N", 8) << pad("Pos", 8) << "Neg\n";
    for (const auto& c : report.categories) {
        std::string auroc_text = c.defined
                                     ? fixed3(c.auroc.mean) + " +/- " + fixed3(c.auroc.std_dev)
                                     : "undefined";
        out << pad(c.category, name_width + 2) << pad(auroc_text, 24)
            << pad(std::to_string(c.n_records), 8) << pad(std::to_string(c.n_positive), 8)
            << std::to_string(c.n_negative) << "\n";
        if (!c.defined) {
            out << pad("", name_width + 2) << c.note << "\n";
        }
    }
    if (report.overall_mean) {
        out << pad("overall", name_width + 2) << fixed3(*report.overall_mean) << "\n";
    }
    return out.str();
}

std::vector<SpecificityReport> case_study(const std::vector<PredictionRecord>& records,
                                          const std::string& target_cell) {
    std::map<std::string, std::map<std::string, std::vector<PredictionRecord>>> grouped;
    for (const auto& r : records) {
        if (!r.true_label) {
            continue;
        }
        grouped[r.compound][r.cell_line].push_back(r);
    }
    if (grouped.empty()) {
        throw InputError("case_study: no labeled predictions");
    }
    std::vector<SpecificityReport> reports;
    for (const auto& [drug, cells] : grouped) {
        std::map<std::string, double> ratios;
        for (const auto& [cell, recs] : cells) {
            ratios[cell] = agreement_ratio(recs);
        }
        if (!ratios.count(target_cell)) {
            throw InputError("case_study: drug '" + drug + "' has no predictions for target '" +
                             target_cell + "'");
        }
        reports.push_back(build_specificity_report(drug, ratios, target_cell));
    }
    return reports;
}

std::string specificity_to_json(const std::vector<SpecificityReport>& reports) {
    ordered_json j = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json rj;
        rj["drug"] = r.drug;
        rj["target_cell"] = r.target_cell;
        rj["ratios"] = ordered_json::object();
        for (const auto& [cell, ratio] : r.ratios) {
            rj["ratios"][cell] = ratio;
        }
        rj["target_rank"] = r.target_rank;
        rj["mean_gap"] = r.mean_gap;
        if (r.relative_dominance_pct) {
            rj["relative_dominance_pct"] = *r.relative_dominance_pct;
        } else {
            rj["relative_dominance_pct"] = nullptr;
        }
        j.push_back(std::move(rj));
    }
    return j.dump(2) + "\n";
}

std::string specificity_to_text(const std::vector<SpecificityReport>& reports) {
    size_t name_width = 6;
    for (const auto& r : reports) {
        name_width = std::max(name_width, r.drug.size());
    }
    std::ostringstream out;
    out << pad("Drug", name_width + 2) << pad("Target rank", 14) << pad("Mean gap", 12)
        << "Relative dominance (%)\n";
    for (const auto& r : reports) {
        out << pad(r.drug, name_width + 2) << pad(std::to_string(r.target_rank), 14)
            << pad(fixed3(r.mean_gap), 12)
            << (r.relative_dominance_pct ? fixed1(*r.relative_dominance_pct) : "undefined")
            << "\n";
    }
    return out.str();
}

}  // namespace pertkit::evalsuite
