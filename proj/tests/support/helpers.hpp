#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pertkit/gateway/backends.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("pertkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Backend driven by a plain function; the tests' programmable double.
class FakeBackend final : public pertkit::gateway::ChatBackend {
public:
    using Handler = std::function<std::string(const pertkit::gateway::ChatRequest&)>;

    explicit FakeBackend(Handler handler) : handler_(std::move(handler)) {}

    pertkit::gateway::ChatResponse complete(const pertkit::gateway::ChatRequest& req) override {
        pertkit::gateway::ChatResponse resp;
        resp.content = handler_(req);
        resp.backend = pertkit::gateway::BackendKind::scripted;
        return resp;
    }

private:
    Handler handler_;
};

inline std::string system_text(const pertkit::gateway::ChatRequest& req) {
    std::string out;
    for (const auto& m : req.messages) {
        if (m.role == pertkit::gateway::Role::system) {
            out += m.content;
        }
    }
    return out;
}

inline std::string user_text(const pertkit::gateway::ChatRequest& req) {
    std::string out;
    for (const auto& m : req.messages) {
        if (m.role == pertkit::gateway::Role::user) {
            out += m.content;
        }
    }
    return out;
}

}  // namespace testsupport
