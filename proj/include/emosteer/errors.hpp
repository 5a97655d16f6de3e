#pragma once

#include <stdexcept>
#include <string>

namespace emosteer {

// Bad input data: malformed corpus records, violated invariants, bad arguments.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: unknown keys, missing files, unusable settings.
// Maps to exit code 2 at the CLI boundary.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A backend (chat endpoint, classifier process/endpoint) failed after retries.
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

// A prompt template could not be rendered (e.g. unresolved placeholder).
class RenderError : public std::runtime_error {
public:
    explicit RenderError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace emosteer
