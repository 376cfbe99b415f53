#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pertkit/agents/types.hpp"

namespace pertkit::engine {

// A reasoning trace plus the difficulty score it was processed under. The
// same JSON shape is used for traces.jsonl lines and checkpoint files, so an
// interrupted run resumes byte-identically.
struct TraceRecord {
    agents::ReasoningTrace trace;
    double composite = 0.0;
};

nlohmann::ordered_json trace_to_json(const TraceRecord& record);
TraceRecord trace_from_json(const nlohmann::ordered_json& j);

std::string traces_to_jsonl(const std::vector<TraceRecord>& records);
std::vector<TraceRecord> traces_from_jsonl(const std::string& text, const std::string& origin);

}  // namespace pertkit::engine
