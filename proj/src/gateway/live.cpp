#include "pertkit/gateway/live.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace pertkit::gateway {

namespace {

nlohmann::json request_body(const ChatRequest& req) {
    nlohmann::json body;
    body["model"] = req.model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : req.messages) {
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    body["temperature"] = req.temperature;
    if (req.seed) {
        body["seed"] = *req.seed;
    }
    body["max_tokens"] = req.max_tokens;
    return body;
}

std::string extract_content(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) {
        throw GatewayMalformedBody("response body is not JSON");
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw GatewayMalformedBody("response body has no choices");
    }
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string()) {
        throw GatewayMalformedBody("response body has no choices[0].message.content");
    }
    const std::string content = choice["message"]["content"].get<std::string>();
    if (content.empty()) {
        throw GatewayMalformedBody("response content is empty");
    }
    return content;
}

}  // namespace

ChatResponse LiveBackend::complete(const ChatRequest& req) {
    validate_request(req);

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const std::string payload = request_body(req).dump();
    const auto started = std::chrono::steady_clock::now();

    const size_t max_attempts = config_.backoff_ms.size() + 1;
    for (size_t attempt = 0; attempt < max_attempts; ++attempt) {
        bool retryable = false;
        std::string failure;
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            failure = "transport failure: " + httplib::to_string(err);
            retryable = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                        err == httplib::Error::Write || err == httplib::Error::Connection;
        } else if (res->status >= 200 && res->status < 300) {
            ChatResponse out;
            out.content = extract_content(res->body);
            out.backend = BackendKind::live;
            out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
            return out;
        } else if (res->status >= 500) {
            failure = "HTTP " + std::to_string(res->status);
            retryable = true;
        } else {
            throw GatewayHttpError(res->status, "HTTP " + std::to_string(res->status) + " from " +
                                                    config_.base_url + config_.path);
        }

        if (!retryable || attempt + 1 == max_attempts) {
            if (failure.rfind("transport", 0) == 0) {
                throw GatewayTimeout(failure + " after " + std::to_string(attempt + 1) +
                                     " attempt(s) against " + config_.base_url + config_.path);
            }
            throw GatewayHttpError(500, failure + " after " + std::to_string(attempt + 1) +
                                            " attempt(s) against " + config_.base_url +
                                            config_.path);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms[attempt]));
    }
    throw GatewayError("unreachable");
}

}  // namespace pertkit::gateway
