#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pertkit::signature {

enum class PerturbationType { compound, genetic, other };

PerturbationType perturbation_type_from_string(const std::string& s);
std::string to_string(PerturbationType t);

// One z-score signature for a single experimental condition.
struct ConditionSignature {
    std::string condition_id;
    std::string cell_line;
    std::string compound;
    std::optional<double> dose_um;
    std::optional<double> time_h;
    int replicate_count = 1;
    std::map<std::string, double> gene_z;  // gene symbol -> z-score
    bool high_quality = false;
    bool qc_pass = false;
    PerturbationType pert_type = PerturbationType::other;
};

enum class Direction { up, down };

inline std::string to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

// Per-gene aggregate over all conditions of one (cell line, compound) pair.
struct ConsensusRecord {
    std::string gene;
    int n_up = 0;
    int n_down = 0;
    int n_total = 0;
    double consistency = 0.0;  // max(n_up, n_down) / n_total
    double consensus_z = 0.0;  // replicate-weighted mean z
    Direction direction = Direction::up;
};

// One benchmark query: is `gene` up- or down-regulated when `compound` is
// applied to `cell_line`?
struct BenchmarkItem {
    std::string cell_line;
    std::string compound;
    std::string moa;
    std::string gene;
    int label = 1;  // 1 = up, 0 = down
    double consensus_z = 0.0;
    double consistency = 0.0;
    std::string split = "test";
};

// Per-cell-line aggregate of single-cell counts.
struct PseudobulkMatrix {
    std::string cell_line;
    std::optional<double> time_h;
    std::map<std::string, double> gene_counts;
    int n_cells = 1;
};

}  // namespace pertkit::signature
