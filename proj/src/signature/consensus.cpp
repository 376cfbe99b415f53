#include "pertkit/signature/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pertkit/common/errors.hpp"

namespace pertkit::signature {

PerturbationType perturbation_type_from_string(const std::string& s) {
    if (s == "compound" || s == "trt_cp") {
        return PerturbationType::compound;
    }
    if (s == "genetic") {
        return PerturbationType::genetic;
    }
    return PerturbationType::other;
}

std::string to_string(PerturbationType t) {
    switch (t) {
        case PerturbationType::compound: return "compound";
        case PerturbationType::genetic: return "genetic";
        default: return "other";
    }
}

std::vector<ConditionSignature> filter_signatures(std::span<const ConditionSignature> raw,
                                                  const QualityPolicy& policy) {
    std::vector<ConditionSignature> kept;
    kept.reserve(raw.size());
    for (const auto& sig : raw) {
        if (sig.pert_type != policy.required_type) {
            continue;
        }
        if (policy.require_high_quality && !sig.high_quality) {
            continue;
        }
        if (policy.require_qc_pass && !sig.qc_pass) {
            continue;
        }
        if (policy.annotated_compounds &&
            std::find(policy.annotated_compounds->begin(), policy.annotated_compounds->end(),
                      sig.compound) == policy.annotated_compounds->end()) {
            continue;
        }
        kept.push_back(sig);
    }
    return kept;
}

DirectionalCounts directional_consistency(std::span<const double> zs) {
    if (zs.empty()) {
        throw InputError("directional_consistency: no conditions");
    }
    DirectionalCounts c;
    c.n_total = static_cast<int>(zs.size());
    for (double z : zs) {
        if (z > 0.0) {
            ++c.n_up;
        } else if (z < 0.0) {
            ++c.n_down;
        }
    }
    c.consistency = static_cast<double>(std::max(c.n_up, c.n_down)) / c.n_total;
    return c;
}

double consensus_z(std::span<const double> zs, std::span<const int> weights) {
    if (zs.empty()) {
        throw InputError("consensus_z: no conditions");
    }
    if (zs.size() != weights.size()) {
        throw InputError("consensus_z: zs/weights length mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (size_t i = 0; i < zs.size(); ++i) {
        if (weights[i] < 1) {
            throw InputError("consensus_z: replicate weight must be positive");
        }
        num += static_cast<double>(weights[i]) * zs[i];
        den += static_cast<double>(weights[i]);
    }
    return num / den;
}

std::vector<ConsensusRecord> build_consensus(std::span<const ConditionSignature> conds,
                                             double threshold) {
    if (conds.empty()) {
        return {};
    }
    const std::string& cell = conds.front().cell_line;
    const std::string& compound = conds.front().compound;
    for (const auto& c : conds) {
        if (c.cell_line != cell || c.compound != compound) {
            throw InputError("build_consensus: mixed (cell line, compound) pairs: (" + cell +
                             ", " + compound + ") vs (" + c.cell_line + ", " + c.compound + ")");
        }
        if (c.replicate_count < 1) {
            throw InputError("build_consensus: condition '" + c.condition_id +
                             "' has replicate_count < 1");
        }
    }

    // Gather per-gene (z, weight) pairs. std::map keeps gene order stable.
    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> per_gene;
    for (const auto& c : conds) {
        for (const auto& [gene, z] : c.gene_z) {
            if (!std::isfinite(z)) {
                throw InputError("build_consensus: non-finite z for gene '" + gene +
                                 "' in condition '" + c.condition_id + "'");
            }
            auto& slot = per_gene[gene];
            slot.first.push_back(z);
            slot.second.push_back(c.replicate_count);
        }
    }

    std::vector<ConsensusRecord> out;
    for (auto& [gene, zw] : per_gene) {
        // Canonical summation order makes consensus_z exactly invariant
        // under permutations of the input conditions.
        std::vector<size_t> order(zw.first.size());
        for (size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (zw.first[a] != zw.first[b]) {
                return zw.first[a] < zw.first[b];
            }
            return zw.second[a] < zw.second[b];
        });
        std::vector<double> zs(order.size());
        std::vector<int> ws(order.size());
        for (size_t i = 0; i < order.size(); ++i) {
            zs[i] = zw.first[order[i]];
            ws[i] = zw.second[order[i]];
        }
        zw.first = std::move(zs);
        zw.second = std::move(ws);

        const DirectionalCounts counts = directional_consistency(zw.first);
        if (counts.consistency < threshold) {
            continue;
        }
        ConsensusRecord rec;
        rec.gene = gene;
        rec.n_up = counts.n_up;
        rec.n_down = counts.n_down;
        rec.n_total = counts.n_total;
        rec.consistency = counts.consistency;
        rec.consensus_z = consensus_z(zw.first, zw.second);
        rec.direction = rec.consensus_z > 0.0 ? Direction::up : Direction::down;
        out.push_back(std::move(rec));
    }
    return out;
}

SelectionResult select_query_genes(std::span<const ConsensusRecord> records,
                                   const std::string& cell_line, const std::string& compound,
                                   const std::string& moa, const SelectionOptions& opts) {
    SelectionResult result;
    if (static_cast<int>(records.size()) < opts.min_consistent) {
        result.rejected = true;
        result.rejection_reason = "only " + std::to_string(records.size()) +
                                  " consistently regulated genes (minimum " +
                                  std::to_string(opts.min_consistent) + ")";
        return result;
    }

    std::vector<const ConsensusRecord*> ranked;
    ranked.reserve(records.size());
    for (const auto& r : records) {
        ranked.push_back(&r);
    }
    std::sort(ranked.begin(), ranked.end(), [](const ConsensusRecord* a, const ConsensusRecord* b) {
        const double ma = std::fabs(a->consensus_z);
        const double mb = std::fabs(b->consensus_z);
        if (ma != mb) {
            return ma > mb;
        }
        return a->gene < b->gene;
    });

    int taken_up = 0;
    int taken_down = 0;
    for (const ConsensusRecord* rec : ranked) {
        if (opts.plausibility && !opts.plausibility(*rec)) {
            continue;
        }
        int& taken = rec->direction == Direction::up ? taken_up : taken_down;
        if (taken >= opts.per_direction) {
            continue;
        }
        ++taken;
        BenchmarkItem item;
        item.cell_line = cell_line;
        item.compound = compound;
        item.moa = moa;
        item.gene = rec->gene;
        item.label = rec->direction == Direction::up ? 1 : 0;
        item.consensus_z = rec->consensus_z;
        item.consistency = rec->consistency;
        item.split = opts.split;
        result.items.push_back(std::move(item));
    }
    return result;
}

}  // namespace pertkit::signature
