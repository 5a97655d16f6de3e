#pragma once

#include "emosteer/domain.hpp"
#include "emosteer/emotions.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace emosteer {

/// Validated set of queries loaded from a JSONL file.
struct QueryCorpus {
    std::vector<Query> queries;
    std::map<QueryKind, int> counts;

    const Query* find(const std::string& id) const;
    bool empty() const { return queries.empty(); }
};

/// Validated example entries, indexed by (query_id, emotion, source).
struct ExampleCollection {
    std::vector<ExampleEntry> entries;
    std::map<std::string, std::size_t> index; // ExampleEntry::key() -> position

    const ExampleEntry* find(const std::string& query_id, EmotionLabel emotion,
                             ExampleSource source) const;
};

/// Word -> target-emotion associations (EmoLex subset, Ekman emotions only).
struct EmotionLexicon {
    std::map<std::string, std::set<EmotionLabel>> word_to_emotions;

    bool contains(const std::string& word, EmotionLabel emotion) const;
    std::size_t size() const { return word_to_emotions.size(); }
};

/// Loads `{"id","kind","text","gold_keywords"?}` records, one per line.
/// Rejects duplicate ids and kind/keyword mismatches with line numbers.
QueryCorpus load_queries(const std::filesystem::path& path);

/// Loads `{"query_id","emotion","source","text",...}` records, one per line.
/// Rejects neutral emotions, unknown sources, and duplicate
/// (query_id, emotion, source) triples.
ExampleCollection load_examples(const std::filesystem::path& path);

/// Loads the published EmoLex three-column format `word<TAB>category<TAB>flag`.
/// Keeps only rows with flag 1 whose category names one of the six target
/// emotions; valence rows ("positive"/"negative") and anything else are
/// dropped.
EmotionLexicon load_emolex(const std::filesystem::path& path);

/// Lowercased tokens of `text` (canonical metric preprocessing) whose lexicon
/// entry contains `emotion`, in order of first appearance, deduplicated.
std::vector<std::string> emotional_words(const std::string& text, const EmotionLexicon& lexicon,
                                         EmotionLabel emotion);

void save_queries(const QueryCorpus& corpus, const std::filesystem::path& path);
void save_examples(const ExampleCollection& collection, const std::filesystem::path& path);

} // namespace emosteer
