#include "pertkit/gateway/json_extract.hpp"

#include <algorithm>

namespace pertkit::gateway {

namespace {

// Finds the matching '}' for the '{' at `start`, honoring strings and
// escapes. Returns npos when unbalanced.
size_t find_object_end(const std::string& s, size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) {
                return i;
            }
        }
    }
    return std::string::npos;
}

bool satisfies(const nlohmann::json& obj, const JsonSchema& schema, std::string& why) {
    for (const auto& field : schema.fields) {
        auto it = obj.find(field.key);
        if (it == obj.end() || it->is_null()) {
            if (field.required) {
                why = "missing required key '" + field.key + "'";
                return false;
            }
            continue;
        }
        if (!field.allowed.empty()) {
            if (!it->is_string()) {
                why = "key '" + field.key + "' must be a string";
                return false;
            }
            const std::string value = it->get<std::string>();
            if (std::find(field.allowed.begin(), field.allowed.end(), value) ==
                field.allowed.end()) {
                why = "key '" + field.key + "' has value '" + value + "' outside its domain";
                return false;
            }
        }
    }
    return true;
}

}  // namespace

nlohmann::json extract_json(const std::string& content, const JsonSchema& schema) {
    bool parsed_any = false;
    std::string last_reason;
    size_t pos = content.find('{');
    while (pos != std::string::npos) {
        const size_t end = find_object_end(content, pos);
        if (end != std::string::npos) {
            const std::string candidate = content.substr(pos, end - pos + 1);
            nlohmann::json obj = nlohmann::json::parse(candidate, nullptr, false);
            if (!obj.is_discarded() && obj.is_object()) {
                parsed_any = true;
                std::string why;
                if (satisfies(obj, schema, why)) {
                    return obj;
                }
                last_reason = why;
            }
        }
        pos = content.find('{', pos + 1);
    }
    if (parsed_any) {
        throw MalformedOutput("malformed agent output: " + last_reason);
    }
    throw MalformedOutput("malformed agent output: no JSON object found");
}

}  // namespace pertkit::gateway
