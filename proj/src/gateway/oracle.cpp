#include "pertkit/gateway/oracle.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/hash.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::gateway {

namespace {

constexpr const char* kUp = "upregulated";
constexpr const char* kDown = "downregulated";

std::string flip(const std::string& dir) {
    return dir == kUp ? kDown : kUp;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Reads the value after `label`, up to the next comma or newline.
std::string field_after(const std::string& text, const std::string& label) {
    const size_t pos = text.find(label);
    if (pos == std::string::npos) {
        return "";
    }
    const size_t start = pos + label.size();
    size_t end = text.find_first_of(",\n", start);
    if (end == std::string::npos) {
        end = text.size();
    }
    return trim(text.substr(start, end - start));
}

struct SampleRef {
    std::string cell;
    std::string pert;
    std::string gene;
    bool ok = false;
};

SampleRef parse_labeled_fields(const std::string& text) {
    SampleRef s;
    s.cell = field_after(text, "Cell Line:");
    s.pert = field_after(text, "Perturbation:");
    s.gene = field_after(text, "Target Gene:");
    s.ok = !s.cell.empty() && !s.pert.empty() && !s.gene.empty();
    return s;
}

// Integration user prompts read "In <cell>, will <gene> be upregulated or
// downregulated by <pert>?".
SampleRef parse_integration_question(const std::string& text) {
    static const std::string kIn = "In ";
    static const std::string kWill = ", will ";
    static const std::string kBe = " be upregulated or downregulated by ";
    SampleRef s;
    const size_t in_pos = text.find(kIn);
    const size_t will_pos = text.find(kWill, in_pos);
    const size_t be_pos = text.find(kBe, will_pos);
    const size_t q_pos = text.find('?', be_pos);
    if (in_pos == std::string::npos || will_pos == std::string::npos ||
        be_pos == std::string::npos || q_pos == std::string::npos) {
        return s;
    }
    s.cell = trim(text.substr(in_pos + kIn.size(), will_pos - in_pos - kIn.size()));
    s.gene = trim(text.substr(will_pos + kWill.size(), be_pos - will_pos - kWill.size()));
    const size_t pert_start = be_pos + kBe.size();
    s.pert = trim(text.substr(pert_start, q_pos - pert_start));
    s.ok = !s.cell.empty() && !s.pert.empty() && !s.gene.empty();
    return s;
}

// History lines read "- <gene>: predicted <direction>".
std::vector<std::pair<std::string, std::string>> parse_history(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.rfind("- ", 0) != 0) {
            continue;
        }
        const size_t colon = line.find(": predicted ");
        if (colon == std::string::npos) {
            continue;
        }
        const std::string gene = trim(line.substr(2, colon - 2));
        std::string rest = line.substr(colon + 12);
        const size_t end = rest.find_first_of(" \t:");
        const std::string dir = trim(end == std::string::npos ? rest : rest.substr(0, end));
        if (!gene.empty() && (dir == kUp || dir == kDown)) {
            out.emplace_back(gene, dir);
        }
    }
    return out;
}

}  // namespace

std::string OracleWorld::key(const std::string& cell, const std::string& pert,
                             const std::string& gene) {
    return cell + "|" + pert + "|" + gene;
}

bool OracleWorld::related(const std::string& a, const std::string& b) const {
    if (relations.empty()) {
        return true;
    }
    auto p = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    return relations.count(p) > 0;
}

OracleWorld OracleWorld::load(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InputError(path + ": malformed oracle world JSON");
    }
    OracleWorld w;
    if (j.contains("truth")) {
        for (auto it = j["truth"].begin(); it != j["truth"].end(); ++it) {
            const std::string v = it.value().get<std::string>();
            if (v != kUp && v != kDown) {
                throw InputError(path + ": truth value must be upregulated/downregulated");
            }
            w.truth[it.key()] = v;
        }
    }
    for (const auto& k : j.value("hard", nlohmann::json::array())) {
        w.hard.insert(k.get<std::string>());
    }
    w.base_accuracy_easy = j.value("base_accuracy_easy", w.base_accuracy_easy);
    w.base_accuracy_hard = j.value("base_accuracy_hard", w.base_accuracy_hard);
    w.context_boost = j.value("context_boost", w.context_boost);
    w.judge_problematic_rate = j.value("judge_problematic_rate", w.judge_problematic_rate);
    w.rng_seed = j.value("rng_seed", w.rng_seed);
    for (const auto& pair : j.value("relations", nlohmann::json::array())) {
        std::string a = pair.at(0).get<std::string>();
        std::string b = pair.at(1).get<std::string>();
        if (a > b) {
            std::swap(a, b);
        }
        w.relations.emplace(std::move(a), std::move(b));
    }
    for (double p : {w.base_accuracy_easy, w.base_accuracy_hard, w.context_boost,
                     w.judge_problematic_rate}) {
        if (p < 0.0 || p > 1.0) {
            throw InputError(path + ": probabilities must lie in [0, 1]");
        }
    }
    return w;
}

std::string OracleWorld::to_json() const {
    nlohmann::ordered_json j;
    j["truth"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : std::map<std::string, std::string>(truth.begin(), truth.end())) {
        j["truth"][k] = v;
    }
    j["hard"] = nlohmann::ordered_json::array();
    for (const auto& k : std::set<std::string>(hard.begin(), hard.end())) {
        j["hard"].push_back(k);
    }
    j["base_accuracy_easy"] = base_accuracy_easy;
    j["base_accuracy_hard"] = base_accuracy_hard;
    j["context_boost"] = context_boost;
    j["judge_problematic_rate"] = judge_problematic_rate;
    j["rng_seed"] = rng_seed;
    j["relations"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : relations) {
        j["relations"].push_back({a, b});
    }
    return j.dump(2);
}

ChatResponse OracleBackend::complete(const ChatRequest& req) {
    validate_request(req);

    std::string system;
    std::string user;
    for (const auto& m : req.messages) {
        (m.role == Role::system ? system : user) += m.content + "\n";
    }

    std::mt19937_64 rng(world_.rng_seed ^ canonical_request_hash(req) ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    nlohmann::ordered_json out;
    if (system.find("Cancer Dependency expert") != std::string::npos) {
        const SampleRef s = parse_labeled_fields(user);
        out["context_reasoning"] = "Genomic background of " + s.cell +
                                   " is compatible with the perturbation acting on its target.";
        out["pathway_activity"] = "active";
    } else if (system.find("Systems Biology expert") != std::string::npos) {
        out["network_reasoning"] = "(PerturbationTarget)-(signals)->(Intermediate)-(regulates)->(TargetGene)";
        out["edge_type"] = "positive_regulation";
    } else if (system.find("Molecular Pharmacologist") != std::string::npos) {
        out["mechanism_reasoning"] = "(Compound)-(binds)->(Target) with loss of catalytic activity";
        out["primary_action"] = "inhibition";
    } else if (system.find("Molecular Biology Expert") != std::string::npos) {
        const SampleRef s = parse_integration_question(user);
        std::string dir;
        if (s.ok) {
            const std::string k = OracleWorld::key(s.cell, s.pert, s.gene);
            auto it = world_.truth.find(k);
            if (it != world_.truth.end()) {
                double p = world_.hard.count(k) ? world_.base_accuracy_hard
                                                : world_.base_accuracy_easy;
                if (world_.context_boost > 0.0 && world_.hard.count(k)) {
                    for (const auto& [hist_gene, hist_dir] : parse_history(user)) {
                        const auto truth_it =
                            world_.truth.find(OracleWorld::key(s.cell, s.pert, hist_gene));
                        if (truth_it != world_.truth.end() && truth_it->second == hist_dir &&
                            world_.related(hist_gene, s.gene)) {
                            p = std::min(1.0, p + world_.context_boost);
                            break;
                        }
                    }
                }
                dir = unit(rng) < p ? it->second : flip(it->second);
            }
        }
        if (dir.empty()) {
            dir = unit(rng) < 0.5 ? kUp : kDown;
        }
        out["reasoning"] =
            "Weighing the expert evidence, the most anchored path indicates the target gene is " +
            dir + ".";
        out["answer"] = dir;
        if (user.find("[Neural Prior]") != std::string::npos) {
            out["canonical_reasoning"] = "Canonical pathway reading supports " + dir + ".";
            out["counterfactual_reasoning"] =
                "Assuming the neural prior dominates, the alternative branch was weighed and "
                "set aside.";
        }
    } else if (system.find("Inspector") != std::string::npos ||
               system.find("Consistency Checker") != std::string::npos) {
        const bool problematic = unit(rng) < world_.judge_problematic_rate;
        out["verdict"] = problematic ? "problematic" : "not-problematic";
        out["feedback"] = problematic ? "flagged by synthetic reviewer" : "ok";
    } else {
        // Single-question direction probe.
        const SampleRef s = parse_labeled_fields(user);
        std::string dir;
        if (s.ok) {
            const std::string k = OracleWorld::key(s.cell, s.pert, s.gene);
            auto it = world_.truth.find(k);
            if (it != world_.truth.end()) {
                const double p = world_.hard.count(k) ? world_.base_accuracy_hard
                                                      : world_.base_accuracy_easy;
                dir = unit(rng) < p ? it->second : flip(it->second);
            }
        }
        if (dir.empty()) {
            dir = unit(rng) < 0.5 ? kUp : kDown;
        }
        out["answer"] = dir;
    }

    ChatResponse resp;
    resp.content = out.dump();
    resp.backend = BackendKind::oracle;
    resp.latency_ms = 0;
    return resp;
}

}  // namespace pertkit::gateway
