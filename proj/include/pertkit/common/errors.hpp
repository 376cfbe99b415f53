#pragma once

#include <stdexcept>
#include <string>

namespace pertkit {

// Process exit codes shared by the CLI and the library error types.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    input_error = 3,
    provider_unavailable = 4,
    run_failure = 5,
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct ProviderUnavailable : std::runtime_error {
    explicit ProviderUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct RunFailure : std::runtime_error {
    explicit RunFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pertkit
