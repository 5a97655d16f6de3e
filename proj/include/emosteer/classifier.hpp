#pragma once

#include "emosteer/corpus.hpp"
#include "emosteer/emotions.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace emosteer {

struct ClassifyResult {
    EmotionDistribution distribution;
    bool truncated = false;
};

/// Seven-label emotion classifier contract. classify() must return a
/// distribution over exactly the seven canonical labels summing to 1, must
/// be deterministic for fixed adapter state and text, and must be safe to
/// call concurrently. Inputs beyond max_tokens() are truncated (whitespace
/// tokens) and flagged, never rejected.
class ClassifierAdapter {
public:
    virtual ~ClassifierAdapter() = default;

    virtual std::string name() const = 0;
    /// 0 means unlimited.
    virtual std::size_t max_tokens() const { return 0; }

    /// Throws ValidationError for text that is empty after trimming.
    ClassifyResult classify(const std::string& text) const;

    /// Element-wise classify; per-item failures are re-thrown with the index.
    std::vector<ClassifyResult> classify_batch(const std::vector<std::string>& texts) const;

protected:
    virtual EmotionDistribution classify_impl(const std::string& text) const = 0;
};

/// Deterministic lexicon scorer used as the offline test oracle: target
/// emotion probabilities proportional to token hit counts; no hits at all
/// means neutral 1.0.
class LexiconClassifier : public ClassifierAdapter {
public:
    explicit LexiconClassifier(EmotionLexicon lexicon, std::size_t token_limit = 0)
        : lexicon_(std::move(lexicon)), token_limit_(token_limit) {}

    std::string name() const override { return "lexicon"; }
    std::size_t max_tokens() const override { return token_limit_; }

protected:
    EmotionDistribution classify_impl(const std::string& text) const override;

private:
    EmotionLexicon lexicon_;
    std::size_t token_limit_;
};

/// Remote adapter: POST {base_url}/classify with {"text": ...}, expecting
/// {"labels": {...}} over exactly the seven canonical label strings.
class RemoteClassifier : public ClassifierAdapter {
public:
    explicit RemoteClassifier(std::string base_url, std::size_t token_limit = 512,
                              int timeout_seconds = 60);

    std::string name() const override { return "remote"; }
    std::size_t max_tokens() const override { return token_limit_; }

protected:
    EmotionDistribution classify_impl(const std::string& text) const override;

private:
    std::string host_;
    std::string path_;
    std::size_t token_limit_;
    int timeout_seconds_;
};

class LineProtocolProcess;

/// Local pretrained-transformer adapter. Runs a worker process (the shipped
/// Python worker loading the classifier from a model directory) and speaks a
/// line-delimited JSON protocol: {"text": ...} in, {"labels": {...}} out.
/// Calls are serialized over the single pipe.
class SubprocessClassifier : public ClassifierAdapter {
public:
    /// argv[0] is the executable; the worker must answer one JSON line per
    /// input line.
    explicit SubprocessClassifier(std::vector<std::string> argv, std::size_t token_limit = 512);
    ~SubprocessClassifier() override;

    std::string name() const override { return "transformer"; }
    std::size_t max_tokens() const override { return token_limit_; }

protected:
    EmotionDistribution classify_impl(const std::string& text) const override;

private:
    std::unique_ptr<LineProtocolProcess> process_;
    std::size_t token_limit_;
    mutable std::mutex mutex_;
};

/// Parses a {"labels": {...}} payload, requiring exactly the seven canonical
/// labels with probabilities in [0,1]; small float drift is renormalized,
/// anything else is a BackendError. Shared by the remote and subprocess
/// adapters.
EmotionDistribution parse_label_payload(const std::string& body, const std::string& origin);

} // namespace emosteer
