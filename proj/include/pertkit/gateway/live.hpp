#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pertkit/gateway/backends.hpp"

namespace pertkit::gateway {

struct GatewayError : std::runtime_error {
    explicit GatewayError(const std::string& what) : std::runtime_error(what) {}
};
struct GatewayTimeout : GatewayError {
    explicit GatewayTimeout(const std::string& what) : GatewayError(what) {}
};
struct GatewayHttpError : GatewayError {
    GatewayHttpError(int status, const std::string& what) : GatewayError(what), status(status) {}
    int status;
};
struct GatewayMalformedBody : GatewayError {
    explicit GatewayMalformedBody(const std::string& what) : GatewayError(what) {}
};

struct LiveBackendConfig {
    std::string base_url;  // e.g. http://localhost:8000
    std::string path = "/v1/chat/completions";
    std::string api_key_env = "PERTKIT_API_KEY";
    int timeout_ms = 30000;
    // Retries happen on timeout and 5xx only.
    std::vector<int> backoff_ms = {500, 1000, 2000};
};

// Chat-completion-compatible HTTP backend. Request body carries model,
// messages, temperature, seed and max_tokens; the response content is read
// from choices[0].message.content.
class LiveBackend final : public ChatBackend {
public:
    explicit LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {}

    ChatResponse complete(const ChatRequest& req) override;

private:
    LiveBackendConfig config_;
};

}  // namespace pertkit::gateway
