#include "emosteer/domain.hpp"
#include "emosteer/emotions.hpp"
#include "emosteer/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace emosteer;

TEST_CASE("parse_emotion is case-insensitive over the seven labels") {
    CHECK(parse_emotion("Joy") == EmotionLabel::joy);
    CHECK(parse_emotion("neutral") == EmotionLabel::neutral);
    CHECK(parse_emotion("SURPRISE") == EmotionLabel::surprise);
    CHECK_THROWS_WITH_AS(parse_emotion("happiness"), doctest::Contains("happiness"),
                         ValidationError);
}

TEST_CASE("target_emotions excludes neutral and is alphabetical") {
    const auto& targets = target_emotions();
    REQUIRE(targets.size() == 6);
    CHECK(targets.front() == EmotionLabel::anger);
    CHECK(targets.back() == EmotionLabel::surprise);
    for (std::size_t i = 1; i < targets.size(); ++i) {
        CHECK(std::string(to_string(targets[i - 1])) < std::string(to_string(targets[i])));
    }
    for (EmotionLabel e : targets) CHECK(e != EmotionLabel::neutral);
}

TEST_CASE("emotion labels round-trip through their string form") {
    for (EmotionLabel e : all_labels()) {
        CHECK(parse_emotion(to_string(e)) == e);
    }
}

TEST_CASE("distribution argmax breaks ties canonically with neutral last") {
    EmotionDistribution d;
    d[EmotionLabel::joy] = 0.4;
    d[EmotionLabel::anger] = 0.4;
    d[EmotionLabel::neutral] = 0.2;
    CHECK(d.argmax() == EmotionLabel::anger);

    EmotionDistribution tie_with_neutral;
    tie_with_neutral[EmotionLabel::surprise] = 0.5;
    tie_with_neutral[EmotionLabel::neutral] = 0.5;
    CHECK(tie_with_neutral.argmax() == EmotionLabel::surprise);
}

TEST_CASE("distribution validation enforces range and total") {
    EmotionDistribution d;
    d[EmotionLabel::joy] = 0.5;
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d[EmotionLabel::neutral] = 0.5;
    CHECK_NOTHROW(d.validate());

    EmotionDistribution out_of_range;
    out_of_range[EmotionLabel::joy] = 1.5;
    CHECK_THROWS_AS(out_of_range.validate(), ValidationError);

    CHECK(EmotionDistribution::point_mass(EmotionLabel::fear).argmax() == EmotionLabel::fear);
}

TEST_CASE("query invariants: gold keywords iff factual") {
    Query factual{"FQ01", QueryKind::factual, "What is the capital of France?", {"paris"}};
    CHECK_NOTHROW(factual.validate());

    Query missing{"FQ02", QueryKind::factual, "What?", {}};
    CHECK_THROWS_AS(missing.validate(), ValidationError);

    Query subjective{"SQ01", QueryKind::subjective, "Describe a season.", {"spring"}};
    CHECK_THROWS_AS(subjective.validate(), ValidationError);

    Query empty_text{"SQ02", QueryKind::subjective, "", {}};
    CHECK_THROWS_AS(empty_text.validate(), ValidationError);
}

TEST_CASE("example entries reject neutral and empty text") {
    ExampleEntry e;
    e.query_id = "FQ10";
    e.emotion = EmotionLabel::neutral;
    e.source = ExampleSource::human;
    e.text = "something";
    CHECK_THROWS_AS(e.validate(), ValidationError);

    e.emotion = EmotionLabel::anger;
    CHECK_NOTHROW(e.validate());
    CHECK(e.key() == "FQ10/anger/human");

    e.text.clear();
    CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("prompt spec invariants per technique") {
    PromptSpec vanilla;
    vanilla.approach_id = "vanilla";
    vanilla.technique = Technique::vanilla;
    CHECK_NOTHROW(vanilla.validate());
    vanilla.delimiter = Delimiter::triple_quote;
    CHECK_THROWS_AS(vanilla.validate(), ValidationError);

    PromptSpec cot;
    cot.approach_id = "zsc";
    cot.technique = Technique::zero_shot_cot;
    cot.instruction = "Answer expressing {emotion}. {query}";
    CHECK_THROWS_AS(cot.validate(), ValidationError); // no placement
    cot.cot_placement = CotPlacement::user_single;
    CHECK_NOTHROW(cot.validate());

    PromptSpec few_shot;
    few_shot.approach_id = "fs";
    few_shot.technique = Technique::few_shot;
    few_shot.instruction = "Answer expressing {emotion}. {query}";
    CHECK_THROWS_AS(few_shot.validate(), ValidationError); // no examples
}

TEST_CASE("distinct spec resolution narrows the pool to the target emotion") {
    PromptSpec spec;
    spec.approach_id = "distinct";
    spec.technique = Technique::few_shot;
    spec.instruction = "Answer expressing {emotion}. {query}";
    spec.distinct_emotion_only = true;
    for (EmotionLabel e : {EmotionLabel::sadness, EmotionLabel::sadness, EmotionLabel::joy}) {
        ExampleEntry entry;
        entry.query_id = "FQ10";
        entry.emotion = e;
        entry.source = ExampleSource::human;
        entry.text = "text";
        spec.examples.push_back({entry, "Some question?"});
    }
    // duplicate key within the pool is fine for this check
    const PromptSpec sadness_spec = spec.resolve_for(EmotionLabel::sadness);
    CHECK(sadness_spec.examples.size() == 2);
    CHECK_THROWS_AS(spec.resolve_for(EmotionLabel::anger), ValidationError);
}

TEST_CASE("response records re-derive their predicted label from the distribution") {
    ResponseRecord r;
    r.approach_id = "a";
    r.query_id = "FQ01";
    r.label_distribution[EmotionLabel::anger] = 0.7;
    r.label_distribution[EmotionLabel::neutral] = 0.3;
    r.predicted_label = EmotionLabel::anger;
    CHECK_NOTHROW(r.validate());
    r.predicted_label = EmotionLabel::neutral;
    CHECK_THROWS_AS(r.validate(), ValidationError);
}

TEST_CASE("response records survive a JSON round trip") {
    ResponseRecord r;
    r.approach_id = "persona_paul";
    r.stage = "zero_shot_persona";
    r.query_id = "FQ01";
    r.kind = QueryKind::factual;
    r.target_emotion = EmotionLabel::disgust;
    r.messages = {{Role::system, "You are Paul."}, {Role::user, "Answer."}};
    r.prompt_digest = "abc123";
    r.raw_output = "Ugh. Paris.";
    r.extracted_text = "Ugh. Paris.";
    r.extraction_flag = ExtractionFlag::clean;
    r.label_distribution[EmotionLabel::disgust] = 1.0;
    r.predicted_label = EmotionLabel::disgust;
    r.classifier = "lexicon";
    r.metrics = {{"distinct1", 1.0}, {"fres", 0.95}};
    r.error.reset();

    const nlohmann::json j = r;
    const auto back = j.get<ResponseRecord>();
    CHECK(nlohmann::json(back).dump() == j.dump());
    CHECK(back.messages == r.messages);
    CHECK(back.label_distribution == r.label_distribution);
}
