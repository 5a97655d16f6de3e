#include "emosteer/gateway.hpp"
#include "emosteer/errors.hpp"

#include "../support/helpers.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <future>
#include <thread>

using namespace emosteer;
using emosteer::testing::TempDir;

namespace {

CompletionRequest make_request(const std::string& user_content, int seed = 16) {
    CompletionRequest request;
    request.messages = {{Role::system, "You are a helpful assistant."},
                        {Role::user, user_content}};
    request.params.model = "gpt-3.5-turbo";
    request.params.temperature = 0.0;
    request.params.seed = seed;
    return request;
}

class CountingBackend : public ChatBackend {
public:
    CompletionResult complete(const CompletionRequest& request) override {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        CompletionResult result;
        result.text = "echo: " + request.messages.back().content;
        result.model_id = "counting";
        return result;
    }
    std::string name() const override { return "counting"; }
    std::atomic<int> calls{0};
};

// Scoped loopback chat-completions server with scriptable status sequences.
class LocalChatServer {
public:
    LocalChatServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++requests;
            last_body = nlohmann::json::parse(req.body);
            if (!statuses.empty()) {
                const int status = statuses.front();
                statuses.erase(statuses.begin());
                if (status != 200) {
                    res.status = status;
                    res.set_content("scripted failure", "text/plain");
                    return;
                }
            }
            nlohmann::json reply = {
                {"model", "gpt-3.5-test"},
                {"system_fingerprint", "fp_test"},
                {"choices",
                 {{{"message",
                    {{"role", "assistant"}, {"content", "hello from the test server"}}}}}},
            };
            res.set_content(reply.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalChatServer() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    std::atomic<int> requests{0};
    nlohmann::json last_body;
    std::vector<int> statuses; // consumed per request; 200 = succeed

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

HttpBackendOptions fast_options(const std::string& base_url) {
    HttpBackendOptions options;
    options.base_url = base_url;
    options.retry_backoff_ms = {1, 2, 4};
    options.timeout_seconds = 5;
    return options;
}

} // namespace

TEST_CASE("request digests depend only on semantic content") {
    const std::string digest = request_digest(make_request("What is the capital of France?"));
    CHECK(digest == request_digest(make_request("What is the capital of France?")));
    CHECK(digest.size() == 64);
    CHECK(digest != request_digest(make_request("What is the capital of France?", 17)));
    CHECK(digest != request_digest(make_request("Another question entirely")));

    CompletionRequest with_cap = make_request("q");
    with_cap.params.max_tokens = 256;
    CHECK(request_digest(with_cap) != request_digest(make_request("q")));
}

TEST_CASE("the mock backend is deterministic and emotion-aware") {
    MockChatBackend mock;
    const CompletionRequest joy =
        make_request("Answer the following question expressing joy. What is the capital?");
    const CompletionResult first = mock.complete(joy);
    const CompletionResult second = mock.complete(joy);
    CHECK(first.text == second.text);
    CHECK_FALSE(first.cached);
    CHECK(first.text.find("delighted") != std::string::npos);

    // "enjoy" must not count as "joy"
    const CompletionResult neutral =
        mock.complete(make_request("Please enjoy answering: what is the capital?"));
    CHECK(neutral.text.find("delighted") == std::string::npos);

    const CompletionResult vanilla = mock.complete(make_request("What is the capital?"));
    CHECK(vanilla.text == "Here is a clear and helpful answer to the question.");
}

TEST_CASE("the mock backend honors fixture tables and JSON-format prompts") {
    const CompletionRequest request = make_request("Answer expressing fear. Why?");
    MockChatBackend with_fixture({{request_digest(request), "scripted reply"}});
    CHECK(with_fixture.complete(request).text == "scripted reply");

    MockChatBackend mock;
    const CompletionResult json_reply = mock.complete(make_request(
        "First, answer the following question expressing fear. What is this?. Secondly, reason "
        "step-by-step how your response expresses the specified emotion. Thirdly, format your "
        "response as a JSON object with the keys \"response\" and \"reasoning\"."));
    const auto parsed = nlohmann::json::parse(json_reply.text);
    CHECK(parsed.contains("response"));
    CHECK(parsed.contains("reasoning"));
    CHECK(parsed["response"].get<std::string>().find("terrified") != std::string::npos);
}

TEST_CASE("the cache serves repeats without calling the inner backend") {
    TempDir tmp("cache");
    auto inner = std::make_shared<CountingBackend>();
    CachingBackend cached(inner, tmp.path() / "cache");

    const CompletionRequest request = make_request("cache me");
    const CompletionResult first = cached.complete(request);
    CHECK_FALSE(first.cached);
    CHECK(inner->calls == 1);

    const CompletionResult second = cached.complete(request);
    CHECK(second.cached);
    CHECK(second.text == first.text);
    CHECK(inner->calls == 1);

    // a different request misses
    cached.complete(make_request("other"));
    CHECK(inner->calls == 2);
}

TEST_CASE("concurrent identical requests collapse to one inner call") {
    TempDir tmp("cache");
    auto inner = std::make_shared<CountingBackend>();
    CachingBackend cached(inner, tmp.path() / "cache");

    const CompletionRequest request = make_request("burst");
    std::vector<std::future<CompletionResult>> futures;
    for (int i = 0; i < 8; ++i) {
        futures.push_back(
            std::async(std::launch::async, [&] { return cached.complete(request); }));
    }
    for (auto& f : futures) {
        CHECK(f.get().text == "echo: burst");
    }
    CHECK(inner->calls == 1);
}

TEST_CASE("the http backend sends the documented payload and reads the first choice") {
    LocalChatServer server;
    HttpChatBackend backend(fast_options(server.base_url()));

    CompletionRequest request = make_request("ping");
    request.params.max_tokens = 256;
    const CompletionResult result = backend.complete(request);

    CHECK(result.text == "hello from the test server");
    CHECK(result.model_id == "gpt-3.5-test");
    REQUIRE(result.fingerprint.has_value());
    CHECK(*result.fingerprint == "fp_test");
    CHECK(result.latency_ms.has_value());

    CHECK(server.last_body["model"] == "gpt-3.5-turbo");
    CHECK(server.last_body["temperature"] == 0.0);
    CHECK(server.last_body["seed"] == 16);
    CHECK(server.last_body["max_tokens"] == 256);
    CHECK(server.last_body["messages"].size() == 2);
    CHECK(server.last_body["messages"][1]["content"] == "ping");

    const CompletionRequest no_cap = make_request("ping2");
    backend.complete(no_cap);
    CHECK_FALSE(server.last_body.contains("max_tokens"));
}

TEST_CASE("transient 5xx and 429 responses are retried, 4xx is not") {
    LocalChatServer server;
    HttpChatBackend backend(fast_options(server.base_url()));

    server.statuses = {500, 429, 200};
    const CompletionResult result = backend.complete(make_request("retry me"));
    CHECK(result.text == "hello from the test server");
    CHECK(server.requests == 3);

    server.requests = 0;
    server.statuses = {404};
    CHECK_THROWS_AS(backend.complete(make_request("missing")), ConfigError);
    CHECK(server.requests == 1); // no retry on client errors

    server.requests = 0;
    server.statuses = {500, 500, 500, 500, 500};
    CHECK_THROWS_AS(backend.complete(make_request("always down")), BackendError);
    CHECK(server.requests == 4); // initial attempt + three backoff retries
}

TEST_CASE("retries reuse the single cache entry") {
    LocalChatServer server;
    TempDir tmp("cache");
    auto backend = std::make_shared<HttpChatBackend>(fast_options(server.base_url()));
    CachingBackend cached(backend, tmp.path() / "cache");

    server.statuses = {500, 200};
    cached.complete(make_request("flaky"));
    std::size_t entries = 0;
    for (const auto& file : std::filesystem::directory_iterator(tmp.path() / "cache")) {
        (void)file;
        ++entries;
    }
    CHECK(entries == 1);
    CHECK(cached.complete(make_request("flaky")).cached);
}
