#include "pertkit/gateway/backends.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit::gateway {

using ordered_json = nlohmann::ordered_json;

ScriptedBackend ScriptedBackend::load(const std::string& path) {
    ScriptedBackend backend;
    std::istringstream in(read_text_file(path));
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("request_hash") ||
            !j.contains("response_text")) {
            throw InputError(path + ":" + std::to_string(lineno) + ": malformed script line");
        }
        backend.add(j["request_hash"].get<std::string>(), j["response_text"].get<std::string>());
    }
    return backend;
}

void ScriptedBackend::add(const std::string& request_hash_hex, const std::string& response_text) {
    responses_[request_hash_hex] = response_text;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& req) {
    validate_request(req);
    const std::string h = canonical_request_hash_hex(req);
    auto it = responses_.find(h);
    if (it == responses_.end()) {
        std::string head = req.messages.empty() ? "" : req.messages.back().content.substr(0, 120);
        throw UnscriptedRequest("unscripted request " + h + " (user message starts: '" + head +
                                "')");
    }
    ChatResponse resp;
    resp.content = it->second;
    resp.backend = BackendKind::scripted;
    resp.latency_ms = 0;
    return resp;
}

ScriptWriter::ScriptWriter(std::string path) : path_(std::move(path)) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot open script file for writing: " + path_);
    }
}

void ScriptWriter::record(const ChatRequest& req, const ChatResponse& resp) {
    const std::string h = canonical_request_hash_hex(req);
    std::lock_guard lock(mutex_);
    if (seen_.count(h)) {
        return;
    }
    seen_[h] = true;
    ordered_json j;
    j["request_hash"] = h;
    j["response_text"] = resp.content;
    append_line(path_, j.dump());
}

ChatResponse RecordingBackend::complete(const ChatRequest& req) {
    ChatResponse resp = inner_->complete(req);
    writer_->record(req, resp);
    return resp;
}

ChatResponse TapBackend::complete(const ChatRequest& req) {
    if (observer_) {
        observer_(req);
    }
    return inner_->complete(req);
}

ConcurrencyLimiter::ConcurrencyLimiter(std::shared_ptr<ChatBackend> inner, int max_in_flight)
    : inner_(std::move(inner)), slots_(max_in_flight) {
    if (max_in_flight < 1) {
        throw ConfigError("in-flight cap must be >= 1");
    }
}

ChatResponse ConcurrencyLimiter::complete(const ChatRequest& req) {
    slots_.acquire();
    try {
        ChatResponse resp = inner_->complete(req);
        slots_.release();
        return resp;
    } catch (...) {
        slots_.release();
        throw;
    }
}

}  // namespace pertkit::gateway
