#include "pertkit/difficulty/scheduler.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/agents/prompts.hpp"
#include "pertkit/common/errors.hpp"
#include "pertkit/common/hash.hpp"
#include "pertkit/gateway/json_extract.hpp"

namespace pertkit::difficulty {

using ordered_json = nlohmann::ordered_json;

ProbeResult probe_self_consistency(const agents::QuerySpec& query, gateway::ChatBackend& backend,
                                   const ProbeConfig& config) {
    if (config.trials < 1) {
        throw InputError("probe_self_consistency: trials must be >= 1");
    }
    const std::map<std::string, std::string> values = {
        {"cell_line", query.cell_line},
        {"pert_or_moa", query.moa},
        {"target_gene", query.gene},
    };
    const std::string user = agents::fill(agents::prompts::probe_user, values);

    ProbeResult result;
    int up = 0;
    int down = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
        gateway::ChatRequest req;
        req.model = config.model;
        req.temperature = config.temperature;
        req.max_tokens = config.max_tokens;
        req.seed = static_cast<int64_t>(
            derive_seed(config.root_seed, {"probe", query.key(), std::to_string(trial)}));
        req.messages.push_back(
            {gateway::Role::system, std::string(agents::prompts::probe_system)});
        req.messages.push_back({gateway::Role::user, user});

        try {
            const gateway::ChatResponse resp = backend.complete(req);
            gateway::JsonSchema schema;
            schema.fields.push_back({"answer", {"upregulated", "downregulated"}, true});
            const auto parsed = gateway::extract_json(resp.content, schema);
            const std::string answer = parsed.at("answer").get<std::string>();
            result.votes.push_back(answer);
            (answer == "upregulated" ? up : down) += 1;
        } catch (const gateway::MalformedOutput&) {
            result.votes.push_back("invalid");
        }
    }
    result.consistency =
        static_cast<double>(std::max(up, down)) / static_cast<double>(config.trials);
    if (up + down == 0) {
        result.diagnostic = "all " + std::to_string(config.trials) + " probe trials unparseable";
    }
    return result;
}

DifficultyScore score_sample(const agents::QuerySpec& query, gateway::ChatBackend& backend,
                             const ProbeConfig& config, const knowledge::MoaTargetMap& map,
                             knowledge::RelatednessSource& source, knowledge::Aggregation mode) {
    DifficultyScore score;
    score.query = query;
    const ProbeResult probe = probe_self_consistency(query, backend, config);
    score.consistency = probe.consistency;
    score.votes = probe.votes;
    score.relatedness = knowledge::relatedness(query.moa, query.gene, map, source, mode).score;
    score.composite = score.consistency * score.relatedness;
    return score;
}

std::vector<DifficultyScore> sort_easy_first(std::vector<DifficultyScore> scores) {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const DifficultyScore& a, const DifficultyScore& b) {
                         if (a.composite != b.composite) {
                             return a.composite > b.composite;
                         }
                         return a.query.gene < b.query.gene;
                     });
    return scores;
}

std::string scores_to_jsonl(const std::vector<DifficultyScore>& scores) {
    std::ostringstream out;
    for (const auto& s : scores) {
        ordered_json j;
        j["cell_line"] = s.query.cell_line;
        j["compound"] = s.query.compound;
        j["gene"] = s.query.gene;
        j["consistency"] = s.consistency;
        j["relatedness"] = s.relatedness;
        j["composite"] = s.composite;
        j["votes"] = s.votes;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<DifficultyScore> scores_from_jsonl(const std::string& text,
                                               const std::string& origin) {
    std::vector<DifficultyScore> out;
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
            DifficultyScore s;
            s.query.cell_line = j.at("cell_line").get<std::string>();
            s.query.compound = j.at("compound").get<std::string>();
            s.query.gene = j.at("gene").get<std::string>();
            s.consistency = j.at("consistency").get<double>();
            s.relatedness = j.at("relatedness").get<double>();
            s.composite = j.at("composite").get<double>();
            for (const auto& v : j.value("votes", ordered_json::array())) {
                s.votes.push_back(v.get<std::string>());
            }
            out.push_back(std::move(s));
        } catch (const ordered_json::exception& e) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace pertkit::difficulty
