#include "pertkit/signature/de.hpp"

#include <cmath>

#include "pertkit/signature/stats.hpp"

namespace pertkit::signature {

namespace {

double pseudobulk_mean(const PseudobulkMatrix& m, const std::string& gene) {
    auto it = m.gene_counts.find(gene);
    const double count = it == m.gene_counts.end() ? 0.0 : it->second;
    return count / static_cast<double>(m.n_cells);
}

}  // namespace

DeResult label_pseudobulk_de(const PseudobulkMatrix& treated, const PseudobulkMatrix& control,
                             const CellExpression& cells_treated,
                             const CellExpression& cells_control, double fdr, double lfc) {
    DeResult result;

    struct Tested {
        std::string gene;
        double p = 1.0;
        double log2_fc = 0.0;
    };
    std::vector<Tested> tested;

    for (const auto& [gene, treated_values] : cells_treated) {
        auto it = cells_control.find(gene);
        if (it == cells_control.end()) {
            result.skipped.emplace_back(gene, "no control observations");
            continue;
        }
        const auto& control_values = it->second;
        if (treated_values.size() < 2 || control_values.size() < 2) {
            result.skipped.emplace_back(gene, "fewer than 2 observations on one side");
            continue;
        }
        Tested t;
        t.gene = gene;
        t.p = mann_whitney_u(treated_values, control_values).p_value;
        const double mean_t = pseudobulk_mean(treated, gene);
        const double mean_c = pseudobulk_mean(control, gene);
        t.log2_fc = std::log2((mean_t + 1.0) / (mean_c + 1.0));
        tested.push_back(std::move(t));
    }

    std::vector<double> ps;
    ps.reserve(tested.size());
    for (const auto& t : tested) {
        ps.push_back(t.p);
    }
    const std::vector<double> qs = benjamini_hochberg(ps);

    for (size_t i = 0; i < tested.size(); ++i) {
        DeGene g;
        g.p_value = tested[i].p;
        g.q_value = qs[i];
        g.log2_fc = tested[i].log2_fc;
        if (g.q_value < fdr && std::fabs(g.log2_fc) > lfc) {
            g.label = g.log2_fc > 0.0 ? DeLabel::up : DeLabel::down;
        } else {
            g.label = DeLabel::unchanged;
        }
        result.genes[tested[i].gene] = g;
    }
    return result;
}

}  // namespace pertkit::signature
