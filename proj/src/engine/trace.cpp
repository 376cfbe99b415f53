#include "pertkit/engine/trace.hpp"

#include <sstream>

#include "pertkit/common/errors.hpp"

namespace pertkit::engine {

using ordered_json = nlohmann::ordered_json;

namespace {

agents::ExpertKind expert_kind_from(const std::string& s) {
    if (s == "context") {
        return agents::ExpertKind::context;
    }
    if (s == "mechanism") {
        return agents::ExpertKind::mechanism;
    }
    return agents::ExpertKind::network;
}

}  // namespace

ordered_json trace_to_json(const TraceRecord& record) {
    const auto& t = record.trace;
    ordered_json j;
    j["cell_line"] = t.query.cell_line;
    j["compound"] = t.query.compound;
    j["moa"] = t.query.moa;
    j["gene"] = t.query.gene;
    j["composite"] = record.composite;

    j["experts"] = ordered_json::array();
    for (const auto& e : t.experts) {
        ordered_json ej;
        ej["kind"] = to_string(e.kind);
        ej["reasoning"] = e.reasoning;
        ej["tag"] = e.tag;
        ej["failed"] = e.failed;
        j["experts"].push_back(std::move(ej));
    }

    ordered_json ij;
    ij["reasoning"] = t.gated.integration.reasoning;
    ij["answer"] = t.gated.integration.answer;
    ij["canonical_reasoning"] = t.gated.integration.canonical_reasoning;
    if (t.gated.integration.counterfactual_reasoning) {
        ij["counterfactual_reasoning"] = *t.gated.integration.counterfactual_reasoning;
    } else {
        ij["counterfactual_reasoning"] = nullptr;
    }
    j["integration"] = std::move(ij);

    j["judges"] = ordered_json::array();
    for (const auto& v : t.gated.verdicts) {
        ordered_json vj;
        vj["judge_id"] = v.judge_id;
        vj["verdict"] = v.problematic ? "problematic" : "not-problematic";
        vj["feedback"] = v.feedback;
        j["judges"].push_back(std::move(vj));
    }

    j["retries"] = t.gated.retries;
    j["problem_count"] = t.gated.problem_count;
    j["verified"] = t.verified;
    j["votes"] = t.votes;
    j["score"] = t.score;
    j["final_answer"] = t.final_answer;
    j["history_genes"] = t.history_genes;
    return j;
}

TraceRecord trace_from_json(const ordered_json& j) {
    TraceRecord record;
    auto& t = record.trace;
    try {
        t.query.cell_line = j.at("cell_line").get<std::string>();
        t.query.compound = j.at("compound").get<std::string>();
        t.query.moa = j.at("moa").get<std::string>();
        t.query.gene = j.at("gene").get<std::string>();
        record.composite = j.at("composite").get<double>();

        for (const auto& ej : j.at("experts")) {
            agents::ExpertOutput e;
            e.kind = expert_kind_from(ej.at("kind").get<std::string>());
            e.reasoning = ej.at("reasoning").get<std::string>();
            e.tag = ej.at("tag").get<std::string>();
            e.failed = ej.at("failed").get<bool>();
            t.experts.push_back(std::move(e));
        }

        const auto& ij = j.at("integration");
        t.gated.integration.reasoning = ij.at("reasoning").get<std::string>();
        t.gated.integration.answer = ij.at("answer").get<std::string>();
        t.gated.integration.canonical_reasoning = ij.at("canonical_reasoning").get<std::string>();
        if (!ij.at("counterfactual_reasoning").is_null()) {
            t.gated.integration.counterfactual_reasoning =
                ij.at("counterfactual_reasoning").get<std::string>();
        }

        for (const auto& vj : j.at("judges")) {
            agents::JudgeVerdict v;
            v.judge_id = vj.at("judge_id").get<int>();
            v.problematic = vj.at("verdict").get<std::string>() == "problematic";
            v.feedback = vj.at("feedback").get<std::string>();
            t.gated.verdicts.push_back(std::move(v));
        }

        t.gated.retries = j.at("retries").get<int>();
        t.gated.problem_count = j.at("problem_count").get<int>();
        t.gated.verified = t.gated.problem_count == 0;
        t.verified = j.at("verified").get<bool>();
        for (const auto& v : j.at("votes")) {
            t.votes.push_back(v.get<std::string>());
        }
        t.score = j.at("score").get<double>();
        t.final_answer = j.at("final_answer").get<std::string>();
        for (const auto& g : j.at("history_genes")) {
            t.history_genes.push_back(g.get<std::string>());
        }
    } catch (const ordered_json::exception& e) {
        throw InputError(std::string("malformed trace record: ") + e.what());
    }
    return record;
}

std::string traces_to_jsonl(const std::vector<TraceRecord>& records) {
    std::ostringstream out;
    for (const auto& r : records) {
        out << trace_to_json(r).dump() << '\n';
    }
    return out.str();
}

std::vector<TraceRecord> traces_from_jsonl(const std::string& text, const std::string& origin) {
    std::vector<TraceRecord> out;
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
        out.push_back(trace_from_json(j));
    }
    return out;
}

}  // namespace pertkit::engine
