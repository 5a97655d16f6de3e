#pragma once

#include "emosteer/domain.hpp"
#include "emosteer/emotions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emosteer {

/// Version tags for the shipped normalization tables. Bump when the tables
/// change so stored results stay attributable.
inline constexpr int kContractionTableVersion = 1;
inline constexpr int kSyllableTableVersion = 1;

/// Tokens produced by the canonical preprocessing chain: contraction
/// expansion, punctuation/symbol removal, whitespace tokenization,
/// lowercasing — in that order.
struct TokenizedText {
    std::vector<std::string> tokens;
};

TokenizedText preprocess(const std::string& text);

/// Support-weighted mean of per-class F1 over the classes present in
/// `targets`. Targets must be the six steering emotions; predictions may
/// additionally be neutral, which can only cost recall.
double weighted_f1(const std::vector<EmotionLabel>& targets,
                   const std::vector<EmotionLabel>& predictions);

/// Weighted F1 of (target, predicted) pairs for the factual subset, the
/// subjective subset, and their union. An empty subset yields an unset
/// component rather than zero. Failed records are skipped.
EmotionScore emotion_score(const std::vector<ResponseRecord>& records);

/// Unique n-grams over total n-grams after preprocessing; nullopt when the
/// text has fewer than n tokens (never silently 0).
std::optional<double> distinct_n(const std::string& text, int n);

struct DistinctAggregate {
    std::optional<double> mean;
    std::optional<double> variance; // population variance
    int undefined_count = 0;
};

/// Macro-average of per-response distinct-n; responses with undefined values
/// are excluded and counted.
DistinctAggregate distinct_n_aggregate(const std::vector<std::string>& texts, int n);

/// Corpus-pooled variant: one ratio over the concatenated n-gram bags.
std::optional<double> distinct_n_pooled(const std::vector<std::string>& texts, int n);

struct FleschScore {
    double raw = 0.0;        // 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)
    double normalized = 0.0; // clamp(raw, 0, 100) / 100
};

/// Flesch Reading Ease with the shipped sentence splitter and vowel-group
/// syllable heuristic. Throws ValidationError when the text has no words.
FleschScore flesch_reading_ease(const std::string& text);

/// Syllable count for a single word (heuristic + exception table).
int count_syllables(const std::string& word);

/// One embedding vector per token of `text`; tokenization is up to the
/// provider.
class TokenEmbedder {
public:
    virtual ~TokenEmbedder() = default;
    virtual std::vector<std::vector<double>> embed(const std::string& text) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic offline embedder: hashed character-trigram counts per
/// token, L2-normalized. A lexical stand-in, not a learned model.
class HashedNgramEmbedder : public TokenEmbedder {
public:
    explicit HashedNgramEmbedder(std::size_t dim = 64) : dim_(dim) {}
    std::vector<std::vector<double>> embed(const std::string& text) const override;
    std::string name() const override { return "hashed_ngram"; }

private:
    std::size_t dim_;
};

struct SimilarityScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int excluded_tokens = 0; // degenerate zero-vector tokens dropped
};

/// Greedy-matching similarity over token embeddings: recall averages, over
/// reference tokens, the best cosine match among candidate tokens; precision
/// is symmetric; f1 is their harmonic mean. The reference is always the
/// vanilla-prompt response for the same query.
SimilarityScore semantic_similarity(const std::string& candidate, const std::string& reference,
                                    const TokenEmbedder& embedder);

/// True iff any gold keyword occurs case-insensitively in the extracted
/// response text. Factual queries only.
bool correctness(const ResponseRecord& record, const Query& query);

} // namespace emosteer
