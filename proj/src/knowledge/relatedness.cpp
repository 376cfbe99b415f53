#include "pertkit/knowledge/relatedness.hpp"

#include <algorithm>
#include <mutex>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::knowledge {

std::pair<std::string, std::string> SnapshotSource::key(const std::string& a,
                                                        const std::string& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

SnapshotSource SnapshotSource::load(const std::string& path) {
    SnapshotSource src;
    const TsvTable t = TsvTable::read_file(path);
    for (size_t r = 0; r < t.row_count(); ++r) {
        const auto raw = t.cell_double(r, "combined_score");
        if (!raw) {
            throw InputError(path + ": row " + std::to_string(r + 1) + ": missing combined_score");
        }
        src.add_edge(t.cell(r, "geneA"), t.cell(r, "geneB"), *raw);
    }
    return src;
}

void SnapshotSource::add_edge(const std::string& a, const std::string& b,
                              double raw_score_0_1000) {
    if (raw_score_0_1000 < 0.0 || raw_score_0_1000 > 1000.0) {
        throw InputError("snapshot edge score out of range [0, 1000]: " +
                         format_double(raw_score_0_1000));
    }
    edges_[key(a, b)] = raw_score_0_1000 / 1000.0;
}

void SnapshotSource::save(const std::string& path) const {
    TsvWriter w({"geneA", "geneB", "combined_score"});
    for (const auto& [k, score] : edges_) {
        w.add_row({k.first, k.second, format_double(score * 1000.0)});
    }
    w.write_file(path);
}

std::optional<double> SnapshotSource::pair_score(const std::string& a, const std::string& b) {
    auto it = edges_.find(key(a, b));
    if (it == edges_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<double> CachingSource::pair_score(const std::string& a, const std::string& b) {
    const std::string k = a <= b ? a + "\t" + b : b + "\t" + a;
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(k);
        if (it != cache_.end()) {
            return it->second;
        }
    }
    const std::optional<double> score = inner_->pair_score(a, b);
    {
        std::unique_lock lock(mutex_);
        cache_[k] = score;
    }
    return score;
}

size_t CachingSource::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

MoaTargetMap MoaTargetMap::load(const std::string& path) {
    MoaTargetMap map;
    const TsvTable t = TsvTable::read_file(path);
    for (size_t r = 0; r < t.row_count(); ++r) {
        map.add(t.cell(r, "moa"), t.cell(r, "gene"));
    }
    return map;
}

void MoaTargetMap::add(const std::string& moa, const std::string& gene) {
    if (moa.empty() || gene.empty()) {
        throw InputError("moa_targets: empty moa or gene");
    }
    auto& genes = targets_[moa];
    if (std::find(genes.begin(), genes.end(), gene) == genes.end()) {
        genes.push_back(gene);
    }
}

const std::vector<std::string>* MoaTargetMap::targets(const std::string& moa) const {
    auto it = targets_.find(moa);
    return it == targets_.end() ? nullptr : &it->second;
}

RelatednessScore relatedness(const std::string& moa, const std::string& gene,
                             const MoaTargetMap& map, RelatednessSource& source,
                             Aggregation mode) {
    RelatednessScore out;
    out.query_gene = gene;
    const std::vector<std::string>* targets = map.targets(moa);
    if (targets == nullptr || targets->empty()) {
        return out;  // unmapped MoA: 0, absent
    }

    double best = -1.0;
    double sum = 0.0;
    int found = 0;
    for (const auto& target : *targets) {
        double score = 0.0;
        if (target == gene) {
            score = 1.0;  // direct MoA target
        } else {
            const auto edge = source.pair_score(target, gene);
            if (!edge) {
                continue;
            }
            score = *edge;
        }
        ++found;
        sum += score;
        if (score > best) {
            best = score;
            out.source_gene = target;
        }
    }
    if (found == 0) {
        return out;  // no edge to any target
    }
    out.score = mode == Aggregation::max ? best : sum / static_cast<double>(targets->size());
    out.provenance = source.provenance();
    return out;
}

RelatednessScore gene_gene(const std::string& g1, const std::string& g2,
                           RelatednessSource& source) {
    RelatednessScore out;
    out.source_gene = g1;
    out.query_gene = g2;
    if (g1 == g2) {
        out.score = 1.0;
        out.provenance = source.provenance();
        return out;
    }
    const auto edge = source.pair_score(g1, g2);
    if (!edge) {
        return out;  // absent
    }
    out.score = *edge;
    out.provenance = source.provenance();
    return out;
}

}  // namespace pertkit::knowledge
