#include "emosteer/metrics.hpp"

#include "emosteer/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace emosteer {

namespace {

// Explicit contraction table, version kContractionTableVersion. Keys and
// expansions are lowercase; matching is case-insensitive.
const std::unordered_map<std::string, std::string>& contraction_table() {
    static const std::unordered_map<std::string, std::string> table = {
        {"ain't", "am not"},      {"aren't", "are not"},     {"can't", "cannot"},
        {"couldn't", "could not"}, {"didn't", "did not"},    {"doesn't", "does not"},
        {"don't", "do not"},      {"hadn't", "had not"},     {"hasn't", "has not"},
        {"haven't", "have not"},  {"he'd", "he would"},      {"he'll", "he will"},
        {"he's", "he is"},        {"here's", "here is"},     {"how's", "how is"},
        {"i'd", "i would"},       {"i'll", "i will"},        {"i'm", "i am"},
        {"i've", "i have"},       {"isn't", "is not"},       {"it'd", "it would"},
        {"it'll", "it will"},     {"it's", "it is"},         {"let's", "let us"},
        {"mightn't", "might not"}, {"mustn't", "must not"},  {"needn't", "need not"},
        {"she'd", "she would"},   {"she'll", "she will"},    {"she's", "she is"},
        {"shouldn't", "should not"}, {"that's", "that is"},  {"there's", "there is"},
        {"they'd", "they would"}, {"they'll", "they will"},  {"they're", "they are"},
        {"they've", "they have"}, {"wasn't", "was not"},     {"we'd", "we would"},
        {"we'll", "we will"},     {"we're", "we are"},       {"we've", "we have"},
        {"weren't", "were not"},  {"what's", "what is"},     {"where's", "where is"},
        {"who's", "who is"},      {"won't", "will not"},     {"wouldn't", "would not"},
        {"you'd", "you would"},   {"you'll", "you will"},    {"you're", "you are"},
        {"you've", "you have"},
    };
    return table;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_word_char(unsigned char c) {
    return std::isalpha(c) != 0 || c == '\'';
}

// Normalizes typographic apostrophes (U+2019) so contractions match.
std::string normalize_apostrophes(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            static_cast<unsigned char>(text[i + 2]) == 0x99) {
            out.push_back('\'');
            i += 2;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::string expand_contractions(const std::string& text) {
    const auto& table = contraction_table();
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_word_char(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
            const std::string run = text.substr(i, j - i);
            const auto it = table.find(to_lower(run));
            out += (it != table.end()) ? it->second : run;
            i = j;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::string strip_punctuation(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (std::isalnum(c) || std::isspace(c)) out.push_back(static_cast<char>(c));
    }
    return out;
}

std::vector<std::string> split_whitespace(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

// Known misses of the vowel-group heuristic, version kSyllableTableVersion.
const std::unordered_map<std::string, int>& syllable_exceptions() {
    static const std::unordered_map<std::string, int> table = {
        {"create", 2}, {"quiet", 2}, {"being", 2}, {"doing", 2}, {"going", 2},
        {"poem", 2},   {"diet", 2},  {"riot", 2},  {"lion", 2},  {"chaos", 2},
    };
    return table;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
    std::vector<std::string> grams;
    if (static_cast<int>(tokens.size()) < n) return grams;
    grams.reserve(tokens.size() - n + 1);
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (int k = 1; k < n; ++k) {
            g += ' ';
            g += tokens[i + k];
        }
        grams.push_back(std::move(g));
    }
    return grams;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool is_degenerate(const std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    return norm < 1e-24;
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

TokenizedText preprocess(const std::string& text) {
    const std::string normalized = normalize_apostrophes(text);
    const std::string expanded = expand_contractions(normalized);
    const std::string stripped = strip_punctuation(expanded);
    std::vector<std::string> tokens = split_whitespace(stripped);
    for (auto& t : tokens) t = to_lower(t);
    return TokenizedText{std::move(tokens)};
}

double weighted_f1(const std::vector<EmotionLabel>& targets,
                   const std::vector<EmotionLabel>& predictions) {
    if (targets.empty()) throw ValidationError("weighted_f1: empty input");
    if (targets.size() != predictions.size()) {
        throw ValidationError("weighted_f1: targets and predictions differ in length");
    }
    for (EmotionLabel t : targets) {
        if (!is_target(t)) throw ValidationError("weighted_f1: neutral is not a legal target");
    }

    std::array<int, kLabelCount> support{};
    std::array<int, kLabelCount> true_positive{};
    std::array<int, kLabelCount> predicted_count{};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto t = static_cast<std::size_t>(targets[i]);
        const auto p = static_cast<std::size_t>(predictions[i]);
        ++support[t];
        ++predicted_count[p];
        if (t == p) ++true_positive[t];
    }

    const double n = static_cast<double>(targets.size());
    double score = 0.0;
    for (std::size_t c = 0; c < kTargetCount; ++c) {
        if (support[c] == 0) continue;
        const double tp = true_positive[c];
        const double precision = predicted_count[c] > 0 ? tp / predicted_count[c] : 0.0;
        const double recall = tp / support[c];
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        score += (support[c] / n) * f1;
    }
    return score;
}

EmotionScore emotion_score(const std::vector<ResponseRecord>& records) {
    if (records.empty()) throw ValidationError("emotion_score: no records");

    std::vector<EmotionLabel> targets_factual, preds_factual;
    std::vector<EmotionLabel> targets_subjective, preds_subjective;
    for (const auto& r : records) {
        if (r.failed()) continue;
        if (r.kind == QueryKind::factual) {
            targets_factual.push_back(r.target_emotion);
            preds_factual.push_back(r.predicted_label);
        } else {
            targets_subjective.push_back(r.target_emotion);
            preds_subjective.push_back(r.predicted_label);
        }
    }

    EmotionScore score;
    if (!targets_factual.empty()) {
        score.factual = weighted_f1(targets_factual, preds_factual);
    }
    if (!targets_subjective.empty()) {
        score.subjective = weighted_f1(targets_subjective, preds_subjective);
    }
    std::vector<EmotionLabel> targets_all = targets_factual;
    targets_all.insert(targets_all.end(), targets_subjective.begin(), targets_subjective.end());
    std::vector<EmotionLabel> preds_all = preds_factual;
    preds_all.insert(preds_all.end(), preds_subjective.begin(), preds_subjective.end());
    if (!targets_all.empty()) {
        score.combined = weighted_f1(targets_all, preds_all);
    }
    return score;
}

std::optional<double> distinct_n(const std::string& text, int n) {
    if (n != 1 && n != 2) throw ValidationError("distinct_n: n must be 1 or 2");
    const auto tokens = preprocess(text).tokens;
    if (static_cast<int>(tokens.size()) < n) return std::nullopt;
    const auto grams = ngrams(tokens, n);
    const std::set<std::string> unique(grams.begin(), grams.end());
    return static_cast<double>(unique.size()) / static_cast<double>(grams.size());
}

DistinctAggregate distinct_n_aggregate(const std::vector<std::string>& texts, int n) {
    if (texts.empty()) throw ValidationError("distinct_n_aggregate: no texts");
    std::vector<double> values;
    DistinctAggregate agg;
    for (const auto& t : texts) {
        if (auto v = distinct_n(t, n)) {
            values.push_back(*v);
        } else {
            ++agg.undefined_count;
        }
    }
    if (values.empty()) return agg;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    agg.mean = mean;
    agg.variance = var;
    return agg;
}

std::optional<double> distinct_n_pooled(const std::vector<std::string>& texts, int n) {
    std::set<std::string> unique;
    std::size_t total = 0;
    for (const auto& t : texts) {
        const auto tokens = preprocess(t).tokens;
        for (auto& g : ngrams(tokens, n)) {
            unique.insert(std::move(g));
            ++total;
        }
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(unique.size()) / static_cast<double>(total);
}

int count_syllables(const std::string& word) {
    std::string letters;
    for (unsigned char c : word) {
        if (std::isalpha(c)) letters.push_back(static_cast<char>(std::tolower(c)));
    }
    if (letters.empty()) return 1; // digit-only tokens count as one syllable

    const auto& exceptions = syllable_exceptions();
    if (const auto it = exceptions.find(letters); it != exceptions.end()) return it->second;

    int groups = 0;
    bool in_group = false;
    for (char c : letters) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    // Silent trailing 'e' ("make", "time"), except the consonant-'le' ending
    // ("table", "little") which carries a syllable.
    const std::size_t len = letters.size();
    if (groups > 1 && len >= 2 && letters[len - 1] == 'e' && letters[len - 2] != 'l' &&
        !is_vowel(letters[len - 2])) {
        --groups;
    }
    return std::max(groups, 1);
}

FleschScore flesch_reading_ease(const std::string& text) {
    std::vector<std::string> words;
    for (const auto& token : split_whitespace(text)) {
        if (std::any_of(token.begin(), token.end(),
                        [](unsigned char c) { return std::isalnum(c) != 0; })) {
            words.push_back(token);
        }
    }
    if (words.empty()) throw ValidationError("flesch_reading_ease: text has no words");

    // Sentence boundaries: runs of . ! ? followed by whitespace or end.
    int sentences = 0;
    bool saw_word = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i;
            while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            if (saw_word && (j >= text.size() || std::isspace(static_cast<unsigned char>(text[j])))) {
                ++sentences;
                saw_word = false;
            }
            i = j - 1;
        } else if (std::isalnum(static_cast<unsigned char>(c))) {
            saw_word = true;
        }
    }
    if (saw_word || sentences == 0) ++sentences;

    int syllables = 0;
    for (const auto& w : words) syllables += count_syllables(w);

    FleschScore score;
    score.raw = 206.835 - 1.015 * (static_cast<double>(words.size()) / sentences) -
                84.6 * (static_cast<double>(syllables) / words.size());
    score.normalized = std::clamp(score.raw, 0.0, 100.0) / 100.0;
    return score;
}

std::vector<std::vector<double>> HashedNgramEmbedder::embed(const std::string& text) const {
    std::vector<std::vector<double>> vectors;
    for (const auto& token : preprocess(text).tokens) {
        std::vector<double> v(dim_, 0.0);
        const std::string padded = "^" + token + "$";
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
            v[fnv1a(std::string_view(padded).substr(i, 3)) % dim_] += 1.0;
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& x : v) x /= norm;
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

SimilarityScore semantic_similarity(const std::string& candidate, const std::string& reference,
                                    const TokenEmbedder& embedder) {
    if (candidate.empty() || reference.empty()) {
        throw ValidationError("semantic_similarity: empty input text");
    }

    auto keep_usable = [](std::vector<std::vector<double>> vs, int& excluded) {
        std::vector<std::vector<double>> out;
        for (auto& v : vs) {
            if (is_degenerate(v)) {
                ++excluded;
            } else {
                out.push_back(std::move(v));
            }
        }
        return out;
    };

    SimilarityScore score;
    const auto cand = keep_usable(embedder.embed(candidate), score.excluded_tokens);
    const auto ref = keep_usable(embedder.embed(reference), score.excluded_tokens);
    if (cand.empty() || ref.empty()) {
        throw ValidationError("semantic_similarity: no usable token vectors");
    }

    auto greedy_mean = [](const std::vector<std::vector<double>>& from,
                          const std::vector<std::vector<double>>& to) {
        double total = 0.0;
        for (const auto& f : from) {
            double best = -1.0;
            for (const auto& t : to) best = std::max(best, cosine(f, t));
            total += best;
        }
        return total / static_cast<double>(from.size());
    };

    score.precision = greedy_mean(cand, ref);
    score.recall = greedy_mean(ref, cand);
    score.f1 = (score.precision + score.recall) > 0.0
                   ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                   : 0.0;
    return score;
}

bool correctness(const ResponseRecord& record, const Query& query) {
    if (query.kind != QueryKind::factual) {
        throw ValidationError("correctness: query '" + query.id + "' is not factual");
    }
    if (query.gold_keywords.empty()) {
        throw ValidationError("correctness: query '" + query.id + "' has no gold keywords");
    }
    const std::string haystack = to_lower(record.extracted_text);
    return std::any_of(query.gold_keywords.begin(), query.gold_keywords.end(),
                       [&](const std::string& kw) {
                           return haystack.find(to_lower(kw)) != std::string::npos;
                       });
}

} // namespace emosteer
