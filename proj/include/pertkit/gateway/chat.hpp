#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pertkit::gateway {

enum class Role { system, user };

inline std::string to_string(Role r) { return r == Role::system ? "system" : "user"; }

struct ChatMessage {
    Role role = Role::user;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    std::optional<int64_t> seed;
    int max_tokens = 1024;
};

// Throws InputError unless the request has at least one user message.
void validate_request(const ChatRequest& req);

enum class BackendKind { live, scripted, oracle };

inline std::string to_string(BackendKind k) {
    switch (k) {
        case BackendKind::live: return "live";
        case BackendKind::scripted: return "scripted";
        default: return "oracle";
    }
}

struct ChatResponse {
    std::string content;
    BackendKind backend = BackendKind::oracle;
    int64_t latency_ms = 0;
};

// Canonical request hash: covers the message list, temperature and seed.
// max_tokens and model are deliberately excluded so replay scripts survive
// token-budget and model-name tuning.
uint64_t canonical_request_hash(const ChatRequest& req);
std::string canonical_request_hash_hex(const ChatRequest& req);

}  // namespace pertkit::gateway
