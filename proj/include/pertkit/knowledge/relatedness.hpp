#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace pertkit::knowledge {

enum class Provenance { live_api, snapshot, absent };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::live_api: return "live_api";
        case Provenance::snapshot: return "snapshot";
        default: return "absent";
    }
}

struct RelatednessScore {
    std::string source_gene;
    std::string query_gene;
    double score = 0.0;  // [0, 1]
    Provenance provenance = Provenance::absent;
};

// Pairwise interaction scores, already normalized to [0, 1]. Symmetric in
// the two genes. Absent edges read as nullopt.
class RelatednessSource {
public:
    virtual ~RelatednessSource() = default;
    virtual std::optional<double> pair_score(const std::string& a, const std::string& b) = 0;
    virtual Provenance provenance() const = 0;
};

// In-memory snapshot of interaction edges, loadable from TSV. Raw combined
// scores on the 0-1000 scale are divided by 1000 at load.
class SnapshotSource final : public RelatednessSource {
public:
    SnapshotSource() = default;

    static SnapshotSource load(const std::string& path);

    void add_edge(const std::string& a, const std::string& b, double raw_score_0_1000);
    void save(const std::string& path) const;

    size_t edge_count() const { return edges_.size(); }

    std::optional<double> pair_score(const std::string& a, const std::string& b) override;
    Provenance provenance() const override { return Provenance::snapshot; }

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b);
    std::map<std::pair<std::string, std::string>, double> edges_;
};

// Thread-safe memoization wrapper; cached and uncached calls return the same
// scores.
class CachingSource final : public RelatednessSource {
public:
    explicit CachingSource(std::shared_ptr<RelatednessSource> inner)
        : inner_(std::move(inner)) {}

    std::optional<double> pair_score(const std::string& a, const std::string& b) override;
    Provenance provenance() const override { return inner_->provenance(); }

    size_t cache_size() const;

private:
    std::shared_ptr<RelatednessSource> inner_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::optional<double>> cache_;
};

// MoA -> annotated target genes. MoAs absent from the map are "unmapped".
class MoaTargetMap {
public:
    MoaTargetMap() = default;

    static MoaTargetMap load(const std::string& path);  // moa_targets.tsv

    void add(const std::string& moa, const std::string& gene);
    const std::vector<std::string>* targets(const std::string& moa) const;
    bool is_mapped(const std::string& moa) const { return targets_.count(moa) > 0; }

private:
    std::map<std::string, std::vector<std::string>> targets_;
};

enum class Aggregation { max, mean };

// Relatedness between a perturbation MoA and a gene: aggregate of the
// pairwise scores between the MoA's target genes and the query gene. A gene
// that is itself a target scores 1. Unmapped MoA or no edge: 0 with absent
// provenance.
RelatednessScore relatedness(const std::string& moa, const std::string& gene,
                             const MoaTargetMap& map, RelatednessSource& source,
                             Aggregation mode = Aggregation::max);

// Pairwise gene relatedness; identical genes score 1.
RelatednessScore gene_gene(const std::string& g1, const std::string& g2,
                           RelatednessSource& source);

}  // namespace pertkit::knowledge
