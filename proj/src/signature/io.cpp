#include "pertkit/signature/io.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::signature {

using ordered_json = nlohmann::ordered_json;

LoadedConditions load_conditions(const std::string& conditions_path,
                                 const std::string& zscores_path) {
    LoadedConditions out;
    const TsvTable cond = TsvTable::read_file(conditions_path);
    std::unordered_map<std::string, size_t> index;  // condition_id -> signatures slot

    for (size_t r = 0; r < cond.row_count(); ++r) {
        const std::string id = cond.cell(r, "condition_id");
        if (id.empty()) {
            out.diagnostics.push_back(conditions_path + ": row " + std::to_string(r + 1) +
                                      ": empty condition_id");
            continue;
        }
        if (index.count(id)) {
            out.diagnostics.push_back(conditions_path + ": row " + std::to_string(r + 1) +
                                      ": duplicate condition_id '" + id + "'");
            continue;
        }
        ConditionSignature sig;
        sig.condition_id = id;
        sig.cell_line = cond.cell(r, "cell_line");
        sig.compound = cond.cell(r, "compound");
        try {
            sig.dose_um = cond.cell_double(r, "dose_um");
            sig.time_h = cond.cell_double(r, "time_h");
            const auto reps = cond.cell_int(r, "replicate_count");
            if (!reps || *reps < 1) {
                out.diagnostics.push_back(conditions_path + ": row " + std::to_string(r + 1) +
                                          ": replicate_count must be >= 1");
                continue;
            }
            sig.replicate_count = static_cast<int>(*reps);
            sig.high_quality = cond.cell_int(r, "is_hiq").value_or(0) != 0;
            sig.qc_pass = cond.cell_int(r, "qc_pass").value_or(0) != 0;
        } catch (const InputError& e) {
            out.diagnostics.push_back(e.what());
            continue;
        }
        sig.pert_type = perturbation_type_from_string(cond.cell(r, "pert_type"));
        index[id] = out.signatures.size();
        out.signatures.push_back(std::move(sig));
    }

    const TsvTable zs = TsvTable::read_file(zscores_path);
    for (size_t r = 0; r < zs.row_count(); ++r) {
        const std::string id = zs.cell(r, "condition_id");
        auto it = index.find(id);
        if (it == index.end()) {
            out.diagnostics.push_back(zscores_path + ": row " + std::to_string(r + 1) +
                                      ": unknown condition_id '" + id + "'");
            continue;
        }
        const std::string gene = zs.cell(r, "gene");
        std::optional<double> z;
        try {
            z = zs.cell_double(r, "z");
        } catch (const InputError& e) {
            out.diagnostics.push_back(e.what());
            continue;
        }
        if (!z || !std::isfinite(*z)) {
            out.diagnostics.push_back(zscores_path + ": row " + std::to_string(r + 1) +
                                      ": missing or non-finite z for gene '" + gene + "'");
            continue;
        }
        out.signatures[it->second].gene_z[gene] = *z;
    }
    return out;
}

std::map<std::string, std::string> load_compound_moa(const std::string& path) {
    const TsvTable t = TsvTable::read_file(path);
    std::map<std::string, std::string> out;
    for (size_t r = 0; r < t.row_count(); ++r) {
        const std::string compound = t.cell(r, "compound");
        const std::string moa = t.cell(r, "moa");
        if (!moa.empty()) {
            out[compound] = moa;
        }
    }
    return out;
}

std::string benchmark_to_jsonl(const std::vector<BenchmarkItem>& items) {
    std::ostringstream out;
    for (const auto& item : items) {
        ordered_json j;
        j["cell_line"] = item.cell_line;
        j["compound"] = item.compound;
        j["moa"] = item.moa;
        j["gene"] = item.gene;
        j["label"] = item.label;
        j["consensus_z"] = item.consensus_z;
        j["consistency"] = item.consistency;
        j["split"] = item.split;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<BenchmarkItem> benchmark_from_jsonl(const std::string& text,
                                                const std::string& origin) {
    std::vector<BenchmarkItem> items;
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
            BenchmarkItem item;
            item.cell_line = j.at("cell_line").get<std::string>();
            item.compound = j.at("compound").get<std::string>();
            item.moa = j.at("moa").get<std::string>();
            item.gene = j.at("gene").get<std::string>();
            item.label = j.at("label").get<int>();
            item.consensus_z = j.at("consensus_z").get<double>();
            item.consistency = j.at("consistency").get<double>();
            item.split = j.value("split", "test");
            if (item.label != 0 && item.label != 1) {
                throw InputError(origin + ":" + std::to_string(lineno) + ": label must be 0 or 1");
            }
            if (item.moa.empty()) {
                throw InputError(origin + ":" + std::to_string(lineno) + ": empty moa");
            }
            items.push_back(std::move(item));
        } catch (const ordered_json::exception& e) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return items;
}

std::vector<BenchmarkItem> load_benchmark(const std::string& path) {
    return benchmark_from_jsonl(read_text_file(path), path);
}

PseudobulkMatrix load_pseudobulk(const std::string& path) {
    const TsvTable t = TsvTable::read_file(path);
    PseudobulkMatrix m;
    for (size_t r = 0; r < t.row_count(); ++r) {
        if (r == 0) {
            m.cell_line = t.cell(r, "cell_line");
            m.time_h = t.cell_double(r, "time_h");
            const auto n = t.cell_int(r, "n_cells");
            if (!n || *n < 1) {
                throw InputError(path + ": n_cells must be >= 1");
            }
            m.n_cells = static_cast<int>(*n);
        }
        const auto count = t.cell_double(r, "count");
        if (!count || *count < 0.0 || !std::isfinite(*count)) {
            throw InputError(path + ": row " + std::to_string(r + 1) +
                             ": count must be finite and non-negative");
        }
        m.gene_counts[t.cell(r, "gene")] = *count;
    }
    return m;
}

LoadedCells load_cells(const std::string& path) {
    const TsvTable t = TsvTable::read_file(path);
    LoadedCells out;
    for (size_t r = 0; r < t.row_count(); ++r) {
        const std::string group = t.cell(r, "group");
        const auto value = t.cell_double(r, "value");
        if (!value) {
            throw InputError(path + ": row " + std::to_string(r + 1) + ": missing value");
        }
        if (group == "treated") {
            out.treated[t.cell(r, "gene")].push_back(*value);
        } else if (group == "control") {
            out.control[t.cell(r, "gene")].push_back(*value);
        } else {
            throw InputError(path + ": row " + std::to_string(r + 1) +
                             ": group must be 'treated' or 'control', got '" + group + "'");
        }
    }
    return out;
}

}  // namespace pertkit::signature
