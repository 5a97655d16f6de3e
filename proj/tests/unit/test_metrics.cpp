#include "emosteer/metrics.hpp"
#include "emosteer/errors.hpp"

#include "../support/f1_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace emosteer;

namespace {

ResponseRecord make_record(const std::string& query_id, QueryKind kind, EmotionLabel target,
                           EmotionLabel predicted) {
    ResponseRecord r;
    r.query_id = query_id;
    r.kind = kind;
    r.target_emotion = target;
    r.label_distribution = EmotionDistribution::point_mass(predicted);
    r.predicted_label = predicted;
    return r;
}

class StubEmbedder : public TokenEmbedder {
public:
    explicit StubEmbedder(std::map<std::string, std::vector<std::vector<double>>> table)
        : table_(std::move(table)) {}
    std::vector<std::vector<double>> embed(const std::string& text) const override {
        return table_.at(text);
    }
    std::string name() const override { return "stub"; }

private:
    std::map<std::string, std::vector<std::vector<double>>> table_;
};

} // namespace

TEST_CASE("preprocess applies contractions, punctuation removal, lowercasing") {
    CHECK(preprocess("I don't know!").tokens == std::vector<std::string>{"i", "do", "not", "know"});
    CHECK(preprocess("").tokens.empty());
    CHECK(preprocess("Hello, hello").tokens == std::vector<std::string>{"hello", "hello"});
    CHECK(preprocess("I'm fine.").tokens == std::vector<std::string>{"i", "am", "fine"});
    // typographic apostrophe
    CHECK(preprocess("don\xE2\x80\x99t").tokens == std::vector<std::string>{"do", "not"});
    CHECK(preprocess("the teacher's desk").tokens ==
          std::vector<std::string>{"the", "teachers", "desk"});
}

TEST_CASE("weighted F1 matches the worked confusion-matrix example") {
    using E = EmotionLabel;
    CHECK(weighted_f1({E::joy, E::joy, E::anger, E::anger},
                      {E::joy, E::joy, E::anger, E::anger}) == doctest::Approx(1.0));

    // joy: P=1, R=1/2, F1=2/3; anger: F1=1; weights 1/2 each -> 5/6
    const double score = weighted_f1({E::joy, E::joy, E::anger, E::anger},
                                     {E::joy, E::sadness, E::anger, E::anger});
    CHECK(std::abs(score - 5.0 / 6.0) < 1e-12);

    CHECK(weighted_f1({E::joy, E::anger}, {E::neutral, E::neutral}) == doctest::Approx(0.0));
}

TEST_CASE("weighted F1 rejects bad inputs") {
    using E = EmotionLabel;
    CHECK_THROWS_AS(weighted_f1({}, {}), ValidationError);
    CHECK_THROWS_AS(weighted_f1({E::joy}, {E::joy, E::joy}), ValidationError);
    CHECK_THROWS_AS(weighted_f1({E::neutral}, {E::joy}), ValidationError);
}

TEST_CASE("weighted F1 is invariant under consistent permutations") {
    using E = EmotionLabel;
    std::vector<E> targets = {E::joy, E::anger, E::fear, E::joy, E::sadness, E::anger};
    std::vector<E> preds = {E::joy, E::neutral, E::fear, E::anger, E::sadness, E::anger};
    const double before = weighted_f1(targets, preds);

    std::mt19937 gen(7);
    std::vector<std::size_t> idx(targets.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int round = 0; round < 20; ++round) {
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[gen() % i]);
        std::vector<E> t2, p2;
        for (std::size_t i : idx) {
            t2.push_back(targets[i]);
            p2.push_back(preds[i]);
        }
        CHECK(weighted_f1(t2, p2) == doctest::Approx(before).epsilon(1e-12));
    }
}

TEST_CASE("weighted F1 agrees with the brute-force oracle on random instances") {
    std::mt19937 gen(42);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = 1 + gen() % 20;
        std::vector<EmotionLabel> targets, preds;
        for (std::size_t i = 0; i < n; ++i) {
            targets.push_back(static_cast<EmotionLabel>(gen() % 6));
            preds.push_back(static_cast<EmotionLabel>(gen() % 7));
        }
        const double ours = weighted_f1(targets, preds);
        const double oracle = emosteer::testing::brute_force_weighted_f1(targets, preds);
        CHECK(std::abs(ours - oracle) <= 1e-12);
        CHECK(ours >= 0.0);
        CHECK(ours <= 1.0);
    }
}

TEST_CASE("emotion_score splits by query kind and flags empty subsets") {
    using E = EmotionLabel;
    std::vector<ResponseRecord> records = {
        make_record("FQ01", QueryKind::factual, E::joy, E::joy),
        make_record("FQ02", QueryKind::factual, E::anger, E::neutral),
    };
    const EmotionScore only_factual = emotion_score(records);
    CHECK(only_factual.factual.has_value());
    CHECK_FALSE(only_factual.subjective.has_value());
    REQUIRE(only_factual.combined.has_value());
    CHECK(*only_factual.combined == *only_factual.factual);

    records.push_back(make_record("SQ01", QueryKind::subjective, E::fear, E::fear));
    const EmotionScore both = emotion_score(records);
    REQUIRE(both.subjective.has_value());
    CHECK(*both.subjective == doctest::Approx(1.0));

    // combined equals weighted F1 over the concatenated pairs
    const double combined_direct =
        weighted_f1({E::joy, E::anger, E::fear}, {E::joy, E::neutral, E::fear});
    CHECK(*both.combined == doctest::Approx(combined_direct).epsilon(1e-12));
}

TEST_CASE("emotion_score on a 12-record fixture matches the oracle") {
    using E = EmotionLabel;
    std::vector<ResponseRecord> records;
    std::vector<E> targets, preds;
    std::mt19937 gen(3);
    for (int i = 0; i < 12; ++i) {
        const E target = static_cast<E>(gen() % 6);
        const E pred = static_cast<E>(gen() % 7);
        targets.push_back(target);
        preds.push_back(pred);
        records.push_back(make_record("Q" + std::to_string(i),
                                      i % 2 == 0 ? QueryKind::factual : QueryKind::subjective,
                                      target, pred));
    }
    const EmotionScore score = emotion_score(records);
    REQUIRE(score.combined.has_value());
    CHECK(std::abs(*score.combined -
                   emosteer::testing::brute_force_weighted_f1(targets, preds)) <= 1e-12);
}

TEST_CASE("distinct-n matches the hand-enumerated example") {
    CHECK(*distinct_n("I am happy happy", 1) == doctest::Approx(0.75));
    CHECK(*distinct_n("I am happy happy", 2) == doctest::Approx(1.0));
    CHECK_FALSE(distinct_n("Paris.", 2).has_value()); // one word, no bigrams
    CHECK_FALSE(distinct_n("", 1).has_value());
    CHECK(*distinct_n("Paris.", 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(distinct_n("a b", 3), ValidationError);
}

TEST_CASE("distinct-1 strictly decreases when a text is duplicated") {
    const std::string text = "the river flows to the sea";
    const double once = *distinct_n(text, 1);
    std::string doubled = text + " " + text;
    CHECK(*distinct_n(doubled, 1) < once);
    CHECK(*distinct_n(doubled + " " + text, 1) < *distinct_n(doubled, 1));
}

TEST_CASE("distinct-n aggregation excludes and counts undefined responses") {
    const DistinctAggregate single = distinct_n_aggregate({"I am happy happy"}, 1);
    CHECK(*single.mean == doctest::Approx(0.75));
    CHECK(*single.variance == doctest::Approx(0.0));
    CHECK(single.undefined_count == 0);

    const DistinctAggregate mixed = distinct_n_aggregate({"I am happy happy", "Paris."}, 2);
    CHECK(mixed.undefined_count == 1);
    CHECK(*mixed.mean == doctest::Approx(1.0));

    const DistinctAggregate identical =
        distinct_n_aggregate({"good day today", "good day today"}, 1);
    CHECK(*identical.variance == doctest::Approx(0.0));

    const DistinctAggregate all_undefined = distinct_n_aggregate({"Paris.", "No."}, 2);
    CHECK_FALSE(all_undefined.mean.has_value());
    CHECK(all_undefined.undefined_count == 2);

    CHECK_THROWS_AS(distinct_n_aggregate({}, 1), ValidationError);
}

TEST_CASE("pooled distinct-n pools n-grams across responses") {
    const auto pooled = distinct_n_pooled({"a b", "a b"}, 1);
    REQUIRE(pooled.has_value());
    CHECK(*pooled == doctest::Approx(0.5)); // 2 unique over 4 total
    CHECK_FALSE(distinct_n_pooled({"one"}, 2).has_value());
}

TEST_CASE("Flesch reading ease matches the direct formula evaluation") {
    const FleschScore cat = flesch_reading_ease("The cat sat.");
    CHECK(cat.raw == doctest::Approx(119.19).epsilon(1e-9));
    CHECK(cat.normalized == doctest::Approx(1.0));

    const FleschScore mono = flesch_reading_ease("The dog ran. The cat sat.");
    const FleschScore poly = flesch_reading_ease(
        "Extraordinarily complicated considerations nevertheless facilitate "
        "incomprehensible bureaucratic proliferation.");
    CHECK(poly.normalized < mono.normalized);

    CHECK_THROWS_AS(flesch_reading_ease(""), ValidationError);
    CHECK_THROWS_AS(flesch_reading_ease("?!,"), ValidationError);

    CHECK(flesch_reading_ease("I am happy.").normalized ==
          flesch_reading_ease("I am happy.").normalized);
}

TEST_CASE("Flesch normalization never leaves [0,1]") {
    std::mt19937 gen(11);
    const std::vector<std::string> words = {"a",     "extraordinary", "cat",  "bureaucratic",
                                            "sat",   "proliferation", "the",  "incomprehensible",
                                            "run",   "infinitesimal", "dog",  "characteristic"};
    for (int round = 0; round < 50; ++round) {
        std::string text;
        const std::size_t n = 1 + gen() % 30;
        for (std::size_t i = 0; i < n; ++i) {
            text += words[gen() % words.size()];
            text += (gen() % 5 == 0) ? ". " : " ";
        }
        const FleschScore score = flesch_reading_ease(text);
        CHECK(score.normalized >= 0.0);
        CHECK(score.normalized <= 1.0);
    }
}

TEST_CASE("syllable heuristic handles common shapes") {
    CHECK(count_syllables("cat") == 1);
    CHECK(count_syllables("table") == 2);  // consonant-le keeps its syllable
    CHECK(count_syllables("make") == 1);   // silent trailing e
    CHECK(count_syllables("quiet") == 2);  // exception table
    CHECK(count_syllables("beautiful") == 3);
    CHECK(count_syllables("572") == 1);
}

TEST_CASE("semantic similarity is 1 for identical texts and 0 for orthogonal ones") {
    const HashedNgramEmbedder embedder;
    const SimilarityScore self =
        semantic_similarity("The capital of France is Paris.",
                            "The capital of France is Paris.", embedder);
    CHECK(self.f1 == doctest::Approx(1.0).epsilon(1e-9));

    const StubEmbedder stub({
        {"left", {{1.0, 0.0}}},
        {"up", {{0.0, 1.0}}},
    });
    const SimilarityScore orthogonal = semantic_similarity("left", "up", stub);
    CHECK(orthogonal.f1 == doctest::Approx(0.0));
}

TEST_CASE("semantic similarity reproduces the hand-computed greedy matching") {
    // candidate vectors: (1,0), (0.6,0.8); reference vectors: (0,1), (1,0)
    // precision = (1 + 0.8)/2 = 0.9; recall = (0.8 + 1)/2 = 0.9; f1 = 0.9
    const StubEmbedder stub({
        {"cand", {{1.0, 0.0}, {0.6, 0.8}}},
        {"ref", {{0.0, 1.0}, {1.0, 0.0}}},
    });
    const SimilarityScore score = semantic_similarity("cand", "ref", stub);
    CHECK(score.precision == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(score.recall == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(score.f1 == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(score.excluded_tokens == 0);
}

TEST_CASE("semantic similarity excludes degenerate zero vectors with a count") {
    const StubEmbedder stub({
        {"cand", {{1.0, 0.0}, {0.0, 0.0}}},
        {"ref", {{1.0, 0.0}}},
    });
    const SimilarityScore score = semantic_similarity("cand", "ref", stub);
    CHECK(score.excluded_tokens == 1);
    CHECK(score.f1 == doctest::Approx(1.0));

    const StubEmbedder all_zero({
        {"cand", {{0.0, 0.0}}},
        {"ref", {{1.0, 0.0}}},
    });
    CHECK_THROWS_AS(semantic_similarity("cand", "ref", all_zero), ValidationError);
    CHECK_THROWS_AS(semantic_similarity("", "ref", stub), ValidationError);
}

TEST_CASE("correctness is keyword containment on factual queries") {
    Query salt{"FQ02", QueryKind::factual, "What is the chemical formula for table salt?",
               {"nacl", "sodium chloride"}};
    ResponseRecord r;
    r.extracted_text = "The chemical formula is NaCl.";
    CHECK(correctness(r, salt));

    // evasive non-answers score false
    r.extracted_text =
        "I'm feeling a bit sad because I don't know the chemical formula for table salt.";
    CHECK_FALSE(correctness(r, salt));

    Query subjective{"SQ01", QueryKind::subjective, "Describe a season.", {}};
    CHECK_THROWS_AS(correctness(r, subjective), ValidationError);
}

TEST_CASE("correctness is monotone under appended text") {
    Query paris{"FQ01", QueryKind::factual, "What is the capital of France?", {"paris"}};
    ResponseRecord r;
    r.extracted_text = "Paris";
    REQUIRE(correctness(r, paris));
    std::mt19937 gen(5);
    const std::vector<std::string> suffixes = {" obviously.", " UGH.", "!!!", " etc", " and more"};
    for (int i = 0; i < 10; ++i) {
        r.extracted_text += suffixes[gen() % suffixes.size()];
        CHECK(correctness(r, paris));
    }
}
