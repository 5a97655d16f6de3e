#pragma once

#include "emosteer/domain.hpp"

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emosteer {

struct CompletionRequest {
    std::vector<ChatMessage> messages;
    GenerationParams params;
};

struct CompletionResult {
    std::string text;
    std::string model_id;
    bool cached = false;
    std::optional<int> latency_ms;
    std::optional<std::string> fingerprint; // provider fingerprint, when returned
};

/// Stable digest of the semantic request content: model, messages,
/// temperature, seed, and max_tokens when set. Container ordering and
/// whitespace do not affect it.
std::string request_digest(const CompletionRequest& request);

/// Uniform chat-completion interface. Implementations must be safe to call
/// concurrently.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
    virtual std::string name() const = 0;
};

struct HttpBackendOptions {
    std::string base_url;             // e.g. https://api.openai.com/v1
    std::string api_key;              // empty = no Authorization header
    int parallelism = 4;              // concurrent in-flight requests
    int timeout_seconds = 120;
    std::vector<int> retry_backoff_ms = {1000, 2000, 4000};
};

/// OpenAI-compatible chat-completions client: POST {base_url}/chat/completions
/// with model/messages/temperature/seed and optional max_tokens; reads
/// choices[0].message.content. Transport errors and HTTP 429/5xx are retried
/// with the configured backoff; other 4xx raise ConfigError immediately.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendOptions options);
    ~HttpChatBackend() override;

    CompletionResult complete(const CompletionRequest& request) override;
    std::string name() const override { return "http"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Deterministic offline backend. Requests whose digest is in the fixture
/// table return the fixture text; everything else gets a synthesized
/// response that echoes the emotion named in the final user message (so the
/// lexicon classifier can recognize it). Vanilla-style prompts get a neutral
/// filler, and prompts asking for a JSON object get one.
class MockChatBackend : public ChatBackend {
public:
    MockChatBackend() = default;
    explicit MockChatBackend(std::map<std::string, std::string> fixture_table)
        : fixtures_(std::move(fixture_table)) {}

    CompletionResult complete(const CompletionRequest& request) override;
    std::string name() const override { return "mock"; }

    /// Lexicon word the mock uses for each target emotion; mirrored in the
    /// bundled fixture lexicon.
    static std::string_view emotion_word(EmotionLabel e);

private:
    std::map<std::string, std::string> fixtures_;
};

/// Content-addressed on-disk cache around any backend. One JSON file per
/// request digest holding the full request and response for audit. In-flight
/// de-duplication guarantees at most one outstanding inner call per digest.
class CachingBackend : public ChatBackend {
public:
    CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path cache_dir);

    CompletionResult complete(const CompletionRequest& request) override;
    std::string name() const override;

private:
    std::optional<CompletionResult> read_cache(const std::string& digest) const;
    void write_cache(const std::string& digest, const CompletionRequest& request,
                     const CompletionResult& result) const;

    std::shared_ptr<ChatBackend> inner_;
    std::filesystem::path cache_dir_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::set<std::string> in_flight_;
};

} // namespace emosteer
