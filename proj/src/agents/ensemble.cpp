#include "pertkit/agents/ensemble.hpp"

#include <algorithm>

#include "pertkit/common/hash.hpp"
#include "pertkit/gateway/json_extract.hpp"

namespace pertkit::agents {

namespace {

constexpr const char* kUp = "upregulated";
constexpr const char* kDown = "downregulated";

struct ExpertSpec {
    ExpertKind kind;
    std::string_view system;
    std::string_view user;
    std::string reasoning_key;
    std::string tag_key;
    std::vector<std::string> tag_domain;  // empty = open domain
};

const std::vector<ExpertSpec>& expert_specs() {
    static const std::vector<ExpertSpec> specs = {
        {ExpertKind::context, prompts::context_system, prompts::context_user, "context_reasoning",
         "pathway_activity", {"active", "inactive", "unknown"}},
        {ExpertKind::mechanism, prompts::mechanism_system, prompts::mechanism_user,
         "mechanism_reasoning", "primary_action", {}},
        {ExpertKind::network, prompts::network_system, prompts::network_user, "network_reasoning",
         "edge_type", {"positive_regulation", "negative_regulation", "complex"}},
    };
    return specs;
}

std::string expert_reasoning_or_placeholder(const std::vector<ExpertOutput>& experts,
                                            ExpertKind kind) {
    for (const auto& e : experts) {
        if (e.kind == kind) {
            return e.failed ? "no evidence from " + to_string(kind) + " agent" : e.reasoning;
        }
    }
    return "no evidence from " + to_string(kind) + " agent";
}

std::string append_block(const std::string& base, const std::string& block) {
    return block.empty() ? base : base + "\n" + block;
}

}  // namespace

AgentEnsemble::AgentEnsemble(gateway::ChatBackend& backend,
                             const knowledge::MoaTargetMap* moa_targets, EnsembleConfig config)
    : backend_(backend), moa_targets_(moa_targets), config_(std::move(config)) {}

std::string AgentEnsemble::pert_target_for(const QuerySpec& query) const {
    if (moa_targets_ != nullptr) {
        if (const auto* targets = moa_targets_->targets(query.moa); targets && !targets->empty()) {
            std::string joined;
            for (const auto& t : *targets) {
                if (!joined.empty()) {
                    joined += ", ";
                }
                joined += t;
            }
            return joined;
        }
    }
    return query.moa;  // unmapped MoA: the annotation itself is the start point
}

std::vector<ExpertOutput> AgentEnsemble::run_experts(const QuerySpec& query,
                                                     const std::string& history_block) const {
    const std::map<std::string, std::string> values = {
        {"cell_line", query.cell_line},
        {"pert_or_moa", query.moa},
        {"target_gene", query.gene},
        {"drug_name", query.compound.empty() ? "unknown" : query.compound},
        {"pert_target", pert_target_for(query)},
    };

    std::vector<ExpertOutput> outputs;
    for (const auto& spec : expert_specs()) {
        gateway::ChatRequest req;
        req.model = config_.model;
        req.temperature = config_.temperature;
        req.max_tokens = config_.max_tokens;
        req.seed = static_cast<int64_t>(
            derive_seed(config_.root_seed, {"expert", to_string(spec.kind), query.key()}));
        req.messages.push_back({gateway::Role::system, std::string(spec.system)});
        req.messages.push_back(
            {gateway::Role::user, append_block(fill(spec.user, values), history_block)});

        ExpertOutput out;
        out.kind = spec.kind;
        try {
            const gateway::ChatResponse resp = backend_.complete(req);
            gateway::JsonSchema schema;
            schema.fields.push_back({spec.reasoning_key, {}, true});
            schema.fields.push_back({spec.tag_key, spec.tag_domain, true});
            const auto parsed = gateway::extract_json(resp.content, schema);
            out.reasoning = parsed.at(spec.reasoning_key).get<std::string>();
            out.tag = parsed.at(spec.tag_key).get<std::string>();
        } catch (const gateway::MalformedOutput&) {
            out.failed = true;
        }
        outputs.push_back(std::move(out));
    }
    return outputs;
}

IntegrationOutput AgentEnsemble::integrate(const QuerySpec& query,
                                           const std::vector<ExpertOutput>& experts,
                                           const std::string& history_block,
                                           const std::optional<NeuralPrior>& prior,
                                           const std::string& feedback_block,
                                           uint64_t seed) const {
    const std::map<std::string, std::string> values = {
        {"cell_line", query.cell_line},
        {"pert_or_moa", query.moa},
        {"target_gene", query.gene},
        {"context_reasoning", expert_reasoning_or_placeholder(experts, ExpertKind::context)},
        {"mechanism_reasoning", expert_reasoning_or_placeholder(experts, ExpertKind::mechanism)},
        {"network_reasoning", expert_reasoning_or_placeholder(experts, ExpertKind::network)},
    };

    std::string user = fill(prompts::integration_user, values);
    user = append_block(user, history_block);
    if (prior) {
        std::string block = "[Neural Prior] predicted: " + prior->predicted_label +
                            ", confidence: " + std::to_string(prior->confidence) +
                            "\nReason both a standard canonical hypothesis and a counterfactual "
                            "hypothesis informed by this prior. Include \"canonical_reasoning\" "
                            "and \"counterfactual_reasoning\" keys in the JSON output.";
        user = append_block(user, block);
    }
    user = append_block(user, feedback_block);

    gateway::ChatRequest req;
    req.model = config_.model;
    req.temperature = config_.temperature;
    req.max_tokens = config_.max_tokens;
    req.seed = static_cast<int64_t>(seed);
    req.messages.push_back({gateway::Role::system, std::string(prompts::integration_system)});
    req.messages.push_back({gateway::Role::user, user});

    const gateway::ChatResponse resp = backend_.complete(req);

    gateway::JsonSchema schema;
    schema.fields.push_back({"reasoning", {}, true});
    schema.fields.push_back({"answer", {kUp, kDown}, true});
    if (prior) {
        schema.fields.push_back({"canonical_reasoning", {}, true});
        schema.fields.push_back({"counterfactual_reasoning", {}, true});
    }
    const auto parsed = gateway::extract_json(resp.content, schema);

    IntegrationOutput out;
    out.reasoning = parsed.at("reasoning").get<std::string>();
    out.answer = parsed.at("answer").get<std::string>();
    if (prior) {
        out.canonical_reasoning = parsed.at("canonical_reasoning").get<std::string>();
        out.counterfactual_reasoning = parsed.at("counterfactual_reasoning").get<std::string>();
    } else {
        out.canonical_reasoning = out.reasoning;
    }
    return out;
}

JudgeVerdict AgentEnsemble::run_judge(int judge_id, const QuerySpec& query,
                                      const IntegrationOutput& integration,
                                      const std::string& history_block, int repetition,
                                      int attempt) const {
    // Slot 4 re-runs the consistency checker with an independent seed.
    std::string_view system;
    std::string_view user;
    switch (judge_id) {
        case 1:
            system = prompts::judge_history_leakage_system;
            user = prompts::judge_history_leakage_user;
            break;
        case 2:
            system = prompts::judge_grounding_system;
            user = prompts::judge_grounding_user;
            break;
        default:
            system = prompts::judge_consistency_system;
            user = prompts::judge_consistency_user;
            break;
    }

    const std::map<std::string, std::string> values = {
        {"cell_line", query.cell_line},
        {"pert_or_moa", query.moa},
        {"target_gene", query.gene},
        {"history_summary", history_block.empty() ? "none" : history_block},
        {"canonical_reasoning", integration.canonical_reasoning},
        {"counterfactual_reasoning", integration.counterfactual_reasoning
                                         ? *integration.counterfactual_reasoning
                                         : "N/A"},
        {"final_reasoning", integration.reasoning},
        {"final_answer", integration.answer},
    };

    gateway::ChatRequest req;
    req.model = config_.model;
    req.temperature = config_.temperature;
    req.max_tokens = config_.max_tokens;
    req.seed = static_cast<int64_t>(derive_seed(
        config_.root_seed, {"judge", std::to_string(judge_id), query.key(),
                            std::to_string(repetition), std::to_string(attempt)}));
    req.messages.push_back({gateway::Role::system, std::string(system)});
    req.messages.push_back({gateway::Role::user, fill(user, values)});

    JudgeVerdict verdict;
    verdict.judge_id = judge_id;
    try {
        const gateway::ChatResponse resp = backend_.complete(req);
        gateway::JsonSchema schema;
        schema.fields.push_back({"verdict", {"problematic", "not-problematic"}, true});
        schema.fields.push_back({"feedback", {}, false});
        const auto parsed = gateway::extract_json(resp.content, schema);
        verdict.problematic = parsed.at("verdict").get<std::string>() == "problematic";
        if (parsed.contains("feedback") && parsed["feedback"].is_string()) {
            verdict.feedback = parsed["feedback"].get<std::string>();
        }
    } catch (const gateway::MalformedOutput& e) {
        // A judge that cannot be parsed counts as problematic.
        verdict.problematic = true;
        verdict.feedback = e.what();
    }
    return verdict;
}

GatedResult AgentEnsemble::judge_gate(const QuerySpec& query,
                                      const std::vector<ExpertOutput>& experts,
                                      const std::string& history_block,
                                      const std::optional<NeuralPrior>& prior,
                                      int repetition) const {
    const int judges = judge_count();
    const int max_attempts = config_.max_retries + 1;

    std::optional<GatedResult> best;  // minimal problem_count; earlier attempt wins ties
    std::string feedback_block;

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const uint64_t seed =
            derive_seed(config_.root_seed, {"integrate", query.key(), std::to_string(repetition),
                                            std::to_string(attempt)});
        IntegrationOutput integration;
        try {
            integration = integrate(query, experts, history_block, prior, feedback_block, seed);
        } catch (const gateway::MalformedOutput& e) {
            // No candidate this attempt; retry with fresh seed.
            feedback_block = "[Verifier Feedback]\n- output parser: " + std::string(e.what());
            continue;
        }

        std::vector<JudgeVerdict> verdicts;
        verdicts.reserve(judges);
        int m = 0;
        for (int judge_id = 1; judge_id <= judges; ++judge_id) {
            JudgeVerdict v = run_judge(judge_id, query, integration, history_block, repetition,
                                       attempt);
            m += v.problematic ? 1 : 0;
            verdicts.push_back(std::move(v));
        }

        GatedResult result;
        result.integration = std::move(integration);
        result.verdicts = std::move(verdicts);
        result.retries = attempt;
        result.problem_count = m;
        if (m == 0) {
            result.verified = true;
            return result;
        }
        if (!best || result.problem_count < best->problem_count) {
            best = result;
        }

        feedback_block = "[Verifier Feedback]";
        for (const auto& v : result.verdicts) {
            if (v.problematic) {
                feedback_block += "\n- judge " + std::to_string(v.judge_id) + ": " +
                                  (v.feedback.empty() ? "problematic" : v.feedback);
            }
        }
    }

    if (best) {
        best->verified = false;
        best->retries = config_.max_retries;
        return *best;
    }
    // Every attempt failed to produce parseable integration output.
    GatedResult failed;
    failed.retries = config_.max_retries;
    failed.verified = false;
    failed.problem_count = judges + 1;
    failed.integration.reasoning = "";
    failed.integration.answer = "";
    return failed;
}

ReasoningTrace AgentEnsemble::predict(const QuerySpec& query, std::vector<HistoryItem> history,
                                      const std::optional<NeuralPrior>& prior) const {
    ReasoningTrace trace;
    trace.query = query;
    for (const auto& item : history) {
        trace.history_genes.push_back(item.gene);
    }
    const std::string history_block = format_history_block(history);

    trace.experts = run_experts(query, history_block);

    int up_votes = 0;
    int valid = 0;
    bool all_verified = true;
    std::optional<GatedResult> representative;
    for (int rep = 0; rep < config_.k_samples; ++rep) {
        GatedResult gated = judge_gate(query, trace.experts, history_block, prior, rep);
        if (gated.integration.answer.empty()) {
            trace.votes.push_back("invalid");
            all_verified = false;
            continue;
        }
        trace.votes.push_back(gated.integration.answer);
        ++valid;
        if (gated.integration.answer == kUp) {
            ++up_votes;
        }
        all_verified = all_verified && gated.verified;
        // Prefer the first verified repetition as the representative record.
        if (!representative || (gated.verified && !representative->verified)) {
            representative = std::move(gated);
        }
    }

    trace.score = config_.k_samples > 0
                      ? static_cast<double>(up_votes) / static_cast<double>(config_.k_samples)
                      : 0.0;
    trace.verified = valid == config_.k_samples && all_verified;
    if (representative) {
        trace.gated = std::move(*representative);
    }
    if (valid == 0) {
        trace.final_answer = "";
        trace.verified = false;
        return trace;
    }
    // Thresholded at 0.5 with ties up, matching the evaluation default.
    trace.final_answer = trace.score >= 0.5 ? kUp : kDown;
    return trace;
}

}  // namespace pertkit::agents
