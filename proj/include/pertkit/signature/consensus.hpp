#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pertkit/signature/types.hpp"

namespace pertkit::signature {

// Which rows count as usable perturbation data.
struct QualityPolicy {
    bool require_high_quality = true;
    bool require_qc_pass = true;
    PerturbationType required_type = PerturbationType::compound;
    // When set, compounds without an entry are dropped (no MoA annotation).
    std::optional<std::vector<std::string>> annotated_compounds;
};

std::vector<ConditionSignature> filter_signatures(
    std::span<const ConditionSignature> raw, const QualityPolicy& policy);

struct DirectionalCounts {
    int n_up = 0;
    int n_down = 0;
    int n_total = 0;
    double consistency = 0.0;
};

// Counts per-condition regulation directions. z == 0 contributes to n_total
// but to neither direction.
DirectionalCounts directional_consistency(std::span<const double> zs);

// Replicate-weighted mean of z-scores: sum(w*z) / sum(w).
double consensus_z(std::span<const double> zs, std::span<const int> weights);

// Per-gene consensus over all conditions of one (cell line, compound) pair.
// Genes below the consistency threshold are dropped; the threshold itself is
// inclusive. A gene absent from a condition's signature contributes nothing
// to that gene's counts.
std::vector<ConsensusRecord> build_consensus(std::span<const ConditionSignature> conds,
                                             double threshold = 0.7);

// Keeps only records the hook approves. Pass-through when empty.
using PlausibilityHook = std::function<bool(const ConsensusRecord&)>;

struct SelectionResult {
    std::vector<BenchmarkItem> items;
    bool rejected = false;
    std::string rejection_reason;
};

struct SelectionOptions {
    int per_direction = 10;
    int min_consistent = 40;
    PlausibilityHook plausibility;  // optional
    std::string split = "test";
};

// Ranks consistent genes by |consensus z| (ties by gene symbol) and keeps up
// to per_direction genes per direction. Pairs with fewer than min_consistent
// records are rejected as a whole.
SelectionResult select_query_genes(std::span<const ConsensusRecord> records,
                                   const std::string& cell_line, const std::string& compound,
                                   const std::string& moa, const SelectionOptions& opts = {});

}  // namespace pertkit::signature
