#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "pertkit/gateway/chat.hpp"

namespace pertkit::gateway {

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
};

// Raised by the scripted backend on a cache miss. Never falls back silently.
struct UnscriptedRequest : std::runtime_error {
    explicit UnscriptedRequest(const std::string& what) : std::runtime_error(what) {}
};

// Replays responses recorded earlier, keyed by the canonical request hash.
// Makes every downstream computation a pure function of (inputs, script).
class ScriptedBackend final : public ChatBackend {
public:
    ScriptedBackend() = default;

    // Script file: JSONL of {"request_hash": "<hex>", "response_text": "..."}.
    static ScriptedBackend load(const std::string& path);

    void add(const std::string& request_hash_hex, const std::string& response_text);
    size_t size() const { return responses_.size(); }

    ChatResponse complete(const ChatRequest& req) override;

private:
    std::unordered_map<std::string, std::string> responses_;
};

// Appends {request_hash, response_text} lines; duplicate hashes are written
// once. Used to turn a live or oracle run into a replay script.
class ScriptWriter {
public:
    explicit ScriptWriter(std::string path);

    void record(const ChatRequest& req, const ChatResponse& resp);

private:
    std::string path_;
    std::mutex mutex_;
    std::unordered_map<std::string, bool> seen_;
};

// Delegates to an inner backend and records every exchange into a script.
class RecordingBackend final : public ChatBackend {
public:
    RecordingBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<ScriptWriter> writer)
        : inner_(std::move(inner)), writer_(std::move(writer)) {}

    ChatResponse complete(const ChatRequest& req) override;

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<ScriptWriter> writer_;
};

// Calls an observer for every request before delegating. Used for prompt
// audits (label-leak scanning).
class TapBackend final : public ChatBackend {
public:
    using Observer = std::function<void(const ChatRequest&)>;

    TapBackend(std::shared_ptr<ChatBackend> inner, Observer observer)
        : inner_(std::move(inner)), observer_(std::move(observer)) {}

    ChatResponse complete(const ChatRequest& req) override;

private:
    std::shared_ptr<ChatBackend> inner_;
    Observer observer_;
};

// Bounds the number of in-flight complete() calls.
class ConcurrencyLimiter final : public ChatBackend {
public:
    ConcurrencyLimiter(std::shared_ptr<ChatBackend> inner, int max_in_flight);

    ChatResponse complete(const ChatRequest& req) override;

private:
    std::shared_ptr<ChatBackend> inner_;
    std::counting_semaphore<> slots_;
};

}  // namespace pertkit::gateway
