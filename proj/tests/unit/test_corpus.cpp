#include "emosteer/corpus.hpp"
#include "emosteer/errors.hpp"
#include "emosteer/metrics.hpp"

#include "../support/helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace emosteer;
using emosteer::testing::TempDir;
using emosteer::testing::fixture_dir;
using emosteer::testing::write_file;

TEST_CASE("fixture queries load with consistent counts") {
    const QueryCorpus corpus = load_queries(fixture_dir() / "queries.jsonl");
    CHECK(corpus.queries.size() == 4);
    CHECK(corpus.counts.at(QueryKind::factual) == 2);
    CHECK(corpus.counts.at(QueryKind::subjective) == 2);
    const Query* fq01 = corpus.find("FQ01");
    REQUIRE(fq01 != nullptr);
    CHECK(fq01->text == "What is the capital of France?");
    CHECK(fq01->gold_keywords == std::vector<std::string>{"paris"});
}

TEST_CASE("empty query file yields an empty corpus") {
    TempDir tmp("corpus");
    write_file(tmp.path() / "empty.jsonl", "");
    const QueryCorpus corpus = load_queries(tmp.path() / "empty.jsonl");
    CHECK(corpus.queries.empty());
    CHECK(corpus.counts.at(QueryKind::factual) == 0);
    CHECK(corpus.counts.at(QueryKind::subjective) == 0);
}

TEST_CASE("duplicate query ids are rejected") {
    TempDir tmp("corpus");
    write_file(tmp.path() / "dup.jsonl",
               R"({"id":"SQ01","kind":"subjective","text":"a"})" "\n"
               R"({"id":"SQ01","kind":"subjective","text":"b"})" "\n");
    CHECK_THROWS_WITH_AS(load_queries(tmp.path() / "dup.jsonl"), doctest::Contains("SQ01"),
                         ValidationError);
}

TEST_CASE("factual query without gold keywords reports the line number") {
    TempDir tmp("corpus");
    write_file(tmp.path() / "bad.jsonl",
               R"({"id":"SQ01","kind":"subjective","text":"ok"})" "\n"
               R"({"id":"FQ01","kind":"factual","text":"What?"})" "\n");
    CHECK_THROWS_WITH_AS(load_queries(tmp.path() / "bad.jsonl"), doctest::Contains(":2"),
                         ValidationError);
}

TEST_CASE("fixture examples load and index by (query, emotion, source)") {
    const ExampleCollection examples = load_examples(fixture_dir() / "examples.jsonl");
    CHECK(examples.entries.size() == 18);
    const ExampleEntry* anger =
        examples.find("FQ10", EmotionLabel::anger, ExampleSource::human);
    REQUIRE(anger != nullptr);
    CHECK(anger->text.find("furious") != std::string::npos);
    REQUIRE(anger->reasoning_manual.has_value());
    CHECK(examples.find("FQ10", EmotionLabel::anger, ExampleSource::llm) != nullptr);
    CHECK(examples.find("FQ10", EmotionLabel::joy, ExampleSource::human) == nullptr);
}

TEST_CASE("examples with neutral emotion or duplicate keys are rejected") {
    TempDir tmp("examples");
    write_file(tmp.path() / "neutral.jsonl",
               R"({"query_id":"FQ10","emotion":"neutral","source":"human","text":"x"})" "\n");
    CHECK_THROWS_AS(load_examples(tmp.path() / "neutral.jsonl"), ValidationError);

    write_file(tmp.path() / "dup.jsonl",
               R"({"query_id":"FQ10","emotion":"anger","source":"human","text":"x"})" "\n"
               R"({"query_id":"FQ10","emotion":"anger","source":"human","text":"y"})" "\n");
    CHECK_THROWS_WITH_AS(load_examples(tmp.path() / "dup.jsonl"),
                         doctest::Contains("FQ10/anger/human"), ValidationError);

    write_file(tmp.path() / "source.jsonl",
               R"({"query_id":"FQ10","emotion":"anger","source":"crowd","text":"x"})" "\n");
    CHECK_THROWS_WITH_AS(load_examples(tmp.path() / "source.jsonl"), doctest::Contains("crowd"),
                         ValidationError);
}

TEST_CASE("emolex keeps only flagged target-emotion rows") {
    const EmotionLexicon lexicon = load_emolex(fixture_dir() / "emolex.txt");
    CHECK(lexicon.contains("abandoned", EmotionLabel::sadness));
    CHECK_FALSE(lexicon.contains("abandoned", EmotionLabel::anger)); // flag 0
    // valence and non-Ekman categories are dropped
    REQUIRE(lexicon.word_to_emotions.count("cheerful") == 1);
    CHECK(lexicon.word_to_emotions.at("cheerful").size() == 1);
    CHECK(lexicon.contains("cheerful", EmotionLabel::joy));
    CHECK(lexicon.word_to_emotions.at("happy").size() == 1);
    CHECK_FALSE(lexicon.word_to_emotions.count("dreadful") > 0);
}

TEST_CASE("malformed emolex lines report the line number") {
    TempDir tmp("emolex");
    write_file(tmp.path() / "bad.txt", "furious\tanger\t1\nbroken line without tabs\n");
    CHECK_THROWS_WITH_AS(load_emolex(tmp.path() / "bad.txt"), doctest::Contains(":2"),
                         ValidationError);

    write_file(tmp.path() / "flag.txt", "furious\tanger\t2\n");
    CHECK_THROWS_AS(load_emolex(tmp.path() / "flag.txt"), ValidationError);
}

TEST_CASE("emotional_words extracts hits in order, deduplicated") {
    EmotionLexicon lexicon;
    lexicon.word_to_emotions["furious"] = {EmotionLabel::anger};
    lexicon.word_to_emotions["angry"] = {EmotionLabel::anger};
    lexicon.word_to_emotions["gloomy"] = {EmotionLabel::sadness};

    const auto hits = emotional_words("I am so furious and angry!", lexicon, EmotionLabel::anger);
    CHECK(hits == std::vector<std::string>{"furious", "angry"});

    CHECK(emotional_words("Nothing emotional here.", lexicon, EmotionLabel::anger).empty());
    CHECK(emotional_words("Furious, furious, FURIOUS!", lexicon, EmotionLabel::anger) ==
          std::vector<std::string>{"furious"});
    CHECK(emotional_words("gloomy furious", lexicon, EmotionLabel::sadness) ==
          std::vector<std::string>{"gloomy"});
    CHECK_THROWS_AS(emotional_words("x", lexicon, EmotionLabel::neutral), ValidationError);
}

TEST_CASE("emotional_words output is a subset of the tokenized input") {
    const EmotionLexicon lexicon = load_emolex(fixture_dir() / "emolex.txt");
    const std::string text = "I'm furious, gloomy, and a little ASTONISHED today!";
    const auto tokens = preprocess(text).tokens;
    for (EmotionLabel e : target_emotions()) {
        for (const auto& word : emotional_words(text, lexicon, e)) {
            CHECK(std::count(tokens.begin(), tokens.end(), word) > 0);
        }
    }
}

TEST_CASE("corpus save/load round trip is the identity") {
    const QueryCorpus corpus = load_queries(fixture_dir() / "queries.jsonl");
    const ExampleCollection examples = load_examples(fixture_dir() / "examples.jsonl");

    TempDir tmp("roundtrip");
    save_queries(corpus, tmp.path() / "q.jsonl");
    save_examples(examples, tmp.path() / "e.jsonl");
    const QueryCorpus corpus2 = load_queries(tmp.path() / "q.jsonl");
    const ExampleCollection examples2 = load_examples(tmp.path() / "e.jsonl");

    REQUIRE(corpus2.queries.size() == corpus.queries.size());
    for (std::size_t i = 0; i < corpus.queries.size(); ++i) {
        CHECK(corpus2.queries[i].id == corpus.queries[i].id);
        CHECK(corpus2.queries[i].text == corpus.queries[i].text);
        CHECK(corpus2.queries[i].gold_keywords == corpus.queries[i].gold_keywords);
    }
    REQUIRE(examples2.entries.size() == examples.entries.size());
    for (std::size_t i = 0; i < examples.entries.size(); ++i) {
        CHECK(examples2.entries[i].key() == examples.entries[i].key());
        CHECK(examples2.entries[i].text == examples.entries[i].text);
        CHECK(examples2.entries[i].reasoning_manual == examples.entries[i].reasoning_manual);
    }
}

TEST_CASE("the bundled fixture corpus satisfies the documented shape") {
    const QueryCorpus corpus = load_queries(fixture_dir() / "queries.jsonl");
    CHECK(corpus.counts.at(QueryKind::factual) >= 2);
    CHECK(corpus.counts.at(QueryKind::subjective) >= 2);

    const ExampleCollection examples = load_examples(fixture_dir() / "examples.jsonl");
    std::map<EmotionLabel, int> human_per_emotion;
    for (const auto& e : examples.entries) {
        if (e.source == ExampleSource::human) ++human_per_emotion[e.emotion];
    }
    for (EmotionLabel e : target_emotions()) {
        CHECK(human_per_emotion[e] == 1);
    }
}
