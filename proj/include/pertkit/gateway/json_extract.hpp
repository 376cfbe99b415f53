#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pertkit::gateway {

// Raised when no JSON object satisfying the schema can be found in a model
// response. Feeds the retry loop upstream.
struct MalformedOutput : std::runtime_error {
    explicit MalformedOutput(const std::string& what) : std::runtime_error(what) {}
};

struct FieldSpec {
    std::string key;
    // Allowed string values; empty means any non-null value is accepted.
    std::vector<std::string> allowed;
    bool required = true;
};

struct JsonSchema {
    std::vector<FieldSpec> fields;
};

// Scans `content` for the first syntactically valid JSON object that
// satisfies the schema. Surrounding prose and fenced code blocks are
// tolerated. Throws MalformedOutput when no candidate parses, or when
// candidates parse but none satisfies the schema.
nlohmann::json extract_json(const std::string& content, const JsonSchema& schema);

}  // namespace pertkit::gateway
