#include "emosteer/classifier.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/metrics.hpp"
#include "emosteer/subprocess.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace emosteer {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string truncate_tokens(const std::string& text, std::size_t limit, bool& truncated) {
    if (limit == 0) return text;
    std::istringstream stream(text);
    std::string token;
    std::string out;
    std::size_t count = 0;
    while (stream >> token) {
        if (count >= limit) {
            truncated = true;
            break;
        }
        if (count > 0) out.push_back(' ');
        out += token;
        ++count;
    }
    return out;
}

} // namespace

ClassifyResult ClassifierAdapter::classify(const std::string& text) const {
    if (trim(text).empty()) {
        throw ValidationError("classify: text is empty after trimming");
    }
    ClassifyResult result;
    const std::string input = truncate_tokens(text, max_tokens(), result.truncated);
    result.distribution = classify_impl(input);
    result.distribution.validate();
    return result;
}

std::vector<ClassifyResult> ClassifierAdapter::classify_batch(
    const std::vector<std::string>& texts) const {
    std::vector<ClassifyResult> results;
    results.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            results.push_back(classify(texts[i]));
        } catch (const std::exception& e) {
            throw ValidationError("classify_batch item " + std::to_string(i) + ": " + e.what());
        }
    }
    return results;
}

EmotionDistribution LexiconClassifier::classify_impl(const std::string& text) const {
    std::array<int, kTargetCount> hits{};
    int total = 0;
    for (const auto& token : preprocess(text).tokens) {
        const auto it = lexicon_.word_to_emotions.find(token);
        if (it == lexicon_.word_to_emotions.end()) continue;
        for (EmotionLabel e : it->second) {
            ++hits[static_cast<std::size_t>(e)];
            ++total;
        }
    }
    if (total == 0) return EmotionDistribution::point_mass(EmotionLabel::neutral);

    EmotionDistribution d;
    for (EmotionLabel e : target_emotions()) {
        d[e] = static_cast<double>(hits[static_cast<std::size_t>(e)]) / total;
    }
    return d;
}

EmotionDistribution parse_label_payload(const std::string& body, const std::string& origin) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(origin + ": unparseable classifier reply: " + e.what());
    }
    if (parsed.contains("error")) {
        throw BackendError(origin + ": " + parsed["error"].get<std::string>());
    }
    if (!parsed.contains("labels") || !parsed["labels"].is_object()) {
        throw BackendError(origin + ": classifier reply has no labels object");
    }
    const auto& labels = parsed["labels"];
    if (labels.size() != kLabelCount) {
        throw BackendError(origin + ": classifier must return exactly the seven labels, got " +
                           std::to_string(labels.size()));
    }
    EmotionDistribution d;
    for (EmotionLabel e : all_labels()) {
        const std::string key(to_string(e));
        if (!labels.contains(key)) {
            throw BackendError(origin + ": classifier reply is missing label '" + key + "'");
        }
        const double p = labels.at(key).get<double>();
        if (!(p >= 0.0 && p <= 1.0) || std::isnan(p)) {
            throw BackendError(origin + ": probability for '" + key + "' outside [0,1]");
        }
        d[e] = p;
    }
    const double total = d.sum();
    if (std::abs(total - 1.0) > 1e-3) {
        throw BackendError(origin + ": classifier probabilities sum to " + std::to_string(total));
    }
    d.normalize();
    return d;
}

RemoteClassifier::RemoteClassifier(std::string base_url, std::size_t token_limit,
                                   int timeout_seconds)
    : token_limit_(token_limit), timeout_seconds_(timeout_seconds) {
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("classifier base_url must include a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = base_url;
        path_ = "/classify";
    } else {
        host_ = base_url.substr(0, path_start);
        path_ = base_url.substr(path_start) + "/classify";
    }
}

EmotionDistribution RemoteClassifier::classify_impl(const std::string& text) const {
    httplib::Client client(host_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    nlohmann::json body;
    body["text"] = text;
    const httplib::Result res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        throw BackendError("classifier endpoint unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status >= 400) {
        throw BackendError("classifier endpoint returned HTTP " + std::to_string(res->status));
    }
    return parse_label_payload(res->body, "remote classifier");
}

SubprocessClassifier::SubprocessClassifier(std::vector<std::string> argv, std::size_t token_limit)
    : process_(std::make_unique<LineProtocolProcess>(argv)), token_limit_(token_limit) {}

SubprocessClassifier::~SubprocessClassifier() = default;

EmotionDistribution SubprocessClassifier::classify_impl(const std::string& text) const {
    nlohmann::json request;
    request["text"] = text;
    const std::lock_guard<std::mutex> lock(mutex_);
    const std::string reply = process_->exchange(request.dump());
    return parse_label_payload(reply, "classifier worker");
}

} // namespace emosteer
