#include "pertkit/gateway/chat.hpp"

#include "pertkit/common/errors.hpp"
#include "pertkit/common/hash.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::gateway {

void validate_request(const ChatRequest& req) {
    bool has_user = false;
    for (const auto& m : req.messages) {
        if (m.role == Role::user) {
            has_user = true;
        }
    }
    if (!has_user) {
        throw InputError("chat request must contain at least one user message");
    }
    if (req.max_tokens < 1) {
        throw InputError("chat request max_tokens must be positive");
    }
    if (req.temperature < 0.0) {
        throw InputError("chat request temperature must be >= 0");
    }
}

uint64_t canonical_request_hash(const ChatRequest& req) {
    Fnv64 h;
    for (const auto& m : req.messages) {
        h.update(to_string(m.role)).update("\x1f").update(m.content).update("\x1e");
    }
    h.update("temp=").update(format_double(req.temperature)).update("\x1e");
    if (req.seed) {
        h.update("seed=").update(std::to_string(*req.seed));
    } else {
        h.update("seed=none");
    }
    return h.value();
}

std::string canonical_request_hash_hex(const ChatRequest& req) {
    return to_hex64(canonical_request_hash(req));
}

}  // namespace pertkit::gateway
