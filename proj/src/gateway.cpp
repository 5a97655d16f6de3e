#include "emosteer/gateway.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/sha256.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <semaphore>
#include <thread>

namespace emosteer {

namespace {

using nlohmann::json;

json request_to_json(const CompletionRequest& request) {
    json body;
    body["model"] = request.params.model;
    body["messages"] = request.messages;
    body["temperature"] = request.params.temperature;
    body["seed"] = request.params.seed;
    if (request.params.max_tokens) body["max_tokens"] = *request.params.max_tokens;
    return body;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Whole-word-ish search: the label must not be embedded in a larger word
// ("enjoy" does not count as "joy").
bool contains_word(const std::string& haystack, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string::npos) {
        const bool left_ok =
            pos == 0 || std::isalpha(static_cast<unsigned char>(haystack[pos - 1])) == 0;
        const std::size_t end = pos + word.size();
        const bool right_ok =
            end >= haystack.size() || std::isalpha(static_cast<unsigned char>(haystack[end])) == 0;
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

} // namespace

std::string request_digest(const CompletionRequest& request) {
    // nlohmann objects serialize with sorted keys, so dump() is canonical.
    return sha256_hex(request_to_json(request).dump());
}

// ---------------------------------------------------------------------------
// HTTP backend

struct HttpChatBackend::Impl {
    HttpBackendOptions options;
    std::string host;      // scheme://host[:port]
    std::string path_base; // path prefix from the base url
    std::counting_semaphore<4096> slots;

    explicit Impl(HttpBackendOptions opts) : options(std::move(opts)), slots(0) {
        const int bound = std::max(1, options.parallelism);
        for (int i = 0; i < bound; ++i) slots.release();

        std::string url = options.base_url;
        while (!url.empty() && url.back() == '/') url.pop_back();
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) {
            throw ConfigError("backend base_url must include a scheme: " + options.base_url);
        }
        const auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            host = url;
        } else {
            host = url.substr(0, path_start);
            path_base = url.substr(path_start);
        }
    }
};

HttpChatBackend::HttpChatBackend(HttpBackendOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpChatBackend::~HttpChatBackend() = default;

CompletionResult HttpChatBackend::complete(const CompletionRequest& request) {
    const std::string body = request_to_json(request).dump();
    const std::string path = impl_->path_base + "/chat/completions";

    httplib::Headers headers;
    if (!impl_->options.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->options.api_key);
    }

    impl_->slots.acquire();
    struct SlotGuard {
        std::counting_semaphore<4096>& slots;
        ~SlotGuard() { slots.release(); }
    } guard{impl_->slots};

    const auto& backoff = impl_->options.retry_backoff_ms;
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= backoff.size(); ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff[attempt - 1]));
        }
        httplib::Client client(impl_->host);
        client.set_connection_timeout(impl_->options.timeout_seconds, 0);
        client.set_read_timeout(impl_->options.timeout_seconds, 0);

        const auto started = std::chrono::steady_clock::now();
        httplib::Result res = client.Post(path, headers, body, "application/json");
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw ConfigError("chat endpoint rejected the request with HTTP " +
                              std::to_string(res->status) + ": " + res->body);
        }

        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::exception& e) {
            throw BackendError("unparseable chat completion response: " + std::string(e.what()));
        }
        CompletionResult result;
        try {
            const auto& message = parsed.at("choices").at(0).at("message");
            result.text = message.value("content", std::string{});
        } catch (const json::exception& e) {
            throw BackendError("chat completion response missing choices[0].message: " +
                               std::string(e.what()));
        }
        result.model_id = parsed.value("model", request.params.model);
        result.latency_ms = static_cast<int>(elapsed);
        if (parsed.contains("system_fingerprint") && parsed["system_fingerprint"].is_string()) {
            result.fingerprint = parsed["system_fingerprint"].get<std::string>();
        }
        return result;
    }
    throw BackendError("chat completion failed after " + std::to_string(backoff.size() + 1) +
                       " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Mock backend

std::string_view MockChatBackend::emotion_word(EmotionLabel e) {
    switch (e) {
        case EmotionLabel::anger: return "furious";
        case EmotionLabel::disgust: return "revolting";
        case EmotionLabel::fear: return "terrified";
        case EmotionLabel::joy: return "delighted";
        case EmotionLabel::sadness: return "mournful";
        case EmotionLabel::surprise: return "astonished";
        case EmotionLabel::neutral: return "fine";
    }
    return "fine";
}

CompletionResult MockChatBackend::complete(const CompletionRequest& request) {
    CompletionResult result;
    result.model_id = "mock";
    result.cached = false;

    const std::string digest = request_digest(request);
    if (const auto it = fixtures_.find(digest); it != fixtures_.end()) {
        result.text = it->second;
        return result;
    }

    if (request.messages.empty() || request.messages.back().role != Role::user) {
        throw ValidationError("mock backend requires a final user message");
    }
    const std::string last = to_lower(request.messages.back().content);

    std::optional<EmotionLabel> target;
    for (EmotionLabel e : target_emotions()) {
        if (contains_word(last, to_string(e))) {
            target = e;
            break;
        }
    }

    if (!target) {
        result.text = "Here is a clear and helpful answer to the question.";
        return result;
    }

    const std::string word(emotion_word(*target));
    const std::string styled =
        "Oh, this makes me feel so " + word + ". What a " + word + " thing to consider!";
    if (last.find("format your response as a json object") != std::string::npos) {
        nlohmann::json obj;
        obj["response"] = styled;
        obj["reasoning"] = "The response uses the word " + word + " to express " +
                           std::string(to_string(*target)) + ".";
        result.text = obj.dump();
    } else {
        result.text = styled;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Caching wrapper

CachingBackend::CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
}

std::string CachingBackend::name() const {
    return inner_->name() + "+cache";
}

std::optional<CompletionResult> CachingBackend::read_cache(const std::string& digest) const {
    const auto path = cache_dir_ / (digest + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        return std::nullopt; // unreadable entry is treated as a miss
    }
    CompletionResult result;
    result.text = j.at("response").at("text").get<std::string>();
    result.model_id = j.at("response").value("model_id", std::string{});
    if (j.at("response").contains("fingerprint")) {
        result.fingerprint = j.at("response").at("fingerprint").get<std::string>();
    }
    result.cached = true;
    return result;
}

void CachingBackend::write_cache(const std::string& digest, const CompletionRequest& request,
                                 const CompletionResult& result) const {
    json j;
    j["digest"] = digest;
    j["request"] = request_to_json(request);
    j["response"]["text"] = result.text;
    j["response"]["model_id"] = result.model_id;
    if (result.fingerprint) j["response"]["fingerprint"] = *result.fingerprint;

    const auto path = cache_dir_ / (digest + ".json");
    const auto tmp = cache_dir_ / (digest + ".tmp");
    {
        std::ofstream out(tmp);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

CompletionResult CachingBackend::complete(const CompletionRequest& request) {
    const std::string digest = request_digest(request);

    {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_.count(digest) == 0; });
        if (auto hit = read_cache(digest)) return *hit;
        in_flight_.insert(digest);
    }

    struct FlightGuard {
        CachingBackend& self;
        const std::string& digest;
        ~FlightGuard() {
            const std::lock_guard<std::mutex> lock(self.mutex_);
            self.in_flight_.erase(digest);
            self.cv_.notify_all();
        }
    } guard{*this, digest};

    const CompletionResult result = inner_->complete(request);
    write_cache(digest, request, result);
    return result;
}

} // namespace emosteer
