#include "emosteer/corpus.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace emosteer {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    return in;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

nlohmann::json parse_line(const std::string& line, const std::filesystem::path& path, int lineno) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": malformed record: " + e.what());
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

const Query* QueryCorpus::find(const std::string& id) const {
    const auto it = std::find_if(queries.begin(), queries.end(),
                                 [&](const Query& q) { return q.id == id; });
    return it == queries.end() ? nullptr : &*it;
}

const ExampleEntry* ExampleCollection::find(const std::string& query_id, EmotionLabel emotion,
                                            ExampleSource source) const {
    ExampleEntry probe;
    probe.query_id = query_id;
    probe.emotion = emotion;
    probe.source = source;
    const auto it = index.find(probe.key());
    return it == index.end() ? nullptr : &entries[it->second];
}

bool EmotionLexicon::contains(const std::string& word, EmotionLabel emotion) const {
    const auto it = word_to_emotions.find(word);
    return it != word_to_emotions.end() && it->second.count(emotion) > 0;
}

QueryCorpus load_queries(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    QueryCorpus corpus;
    corpus.counts[QueryKind::factual] = 0;
    corpus.counts[QueryKind::subjective] = 0;

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto j = parse_line(line, path, lineno);
        Query q;
        try {
            q = j.get<Query>();
            q.validate();
        } catch (const std::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(q.id).second) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": duplicate query id '" + q.id + "'");
        }
        ++corpus.counts[q.kind];
        corpus.queries.push_back(std::move(q));
    }
    return corpus;
}

ExampleCollection load_examples(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    ExampleCollection collection;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto j = parse_line(line, path, lineno);
        ExampleEntry entry;
        try {
            entry = j.get<ExampleEntry>();
            entry.validate();
        } catch (const std::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const std::string key = entry.key();
        if (collection.index.count(key) > 0) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": duplicate example '" + key + "'");
        }
        collection.index[key] = collection.entries.size();
        collection.entries.push_back(std::move(entry));
    }
    return collection;
}

EmotionLexicon load_emolex(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    EmotionLexicon lexicon;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;

        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected word<TAB>category<TAB>flag");
        }
        const std::string word = to_lower(trim(line.substr(0, tab1)));
        const std::string category = trim(line.substr(tab1 + 1, tab2 - tab1 - 1));
        const std::string flag = trim(line.substr(tab2 + 1));
        if (word.empty() || category.empty() || (flag != "0" && flag != "1")) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected word<TAB>category<TAB>flag with flag 0 or 1");
        }
        if (flag != "1") continue;

        // Keep only the six target emotions; valence and any other
        // categories (e.g. anticipation, trust) are dropped.
        EmotionLabel label;
        try {
            label = parse_emotion(category);
        } catch (const ValidationError&) {
            continue;
        }
        if (!is_target(label)) continue;
        lexicon.word_to_emotions[word].insert(label);
    }
    return lexicon;
}

std::vector<std::string> emotional_words(const std::string& text, const EmotionLexicon& lexicon,
                                         EmotionLabel emotion) {
    if (!is_target(emotion)) {
        throw ValidationError("emotional_words: emotion must be a target emotion");
    }
    std::vector<std::string> hits;
    std::set<std::string> seen;
    for (const auto& token : preprocess(text).tokens) {
        if (lexicon.contains(token, emotion) && seen.insert(token).second) {
            hits.push_back(token);
        }
    }
    return hits;
}

void save_queries(const QueryCorpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    for (const auto& q : corpus.queries) {
        out << nlohmann::json(q).dump() << '\n';
    }
}

void save_examples(const ExampleCollection& collection, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    for (const auto& e : collection.entries) {
        out << nlohmann::json(e).dump() << '\n';
    }
}

} // namespace emosteer
