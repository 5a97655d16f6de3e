#pragma once

#include "emosteer/emotions.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emosteer {

enum class QueryKind { factual, subjective };
std::string_view to_string(QueryKind k);
QueryKind parse_query_kind(std::string_view s);

/// A factual or subjective question. Factual queries carry lowercase
/// gold-answer keywords; subjective queries never do.
struct Query {
    std::string id;
    QueryKind kind = QueryKind::factual;
    std::string text;
    std::vector<std::string> gold_keywords; // factual only, non-empty there

    /// Throws ValidationError on invariant violations.
    void validate() const;
};

enum class Role { system, user, assistant };
std::string_view to_string(Role r);
Role parse_role(std::string_view s);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

enum class ExampleSource { human, llm, emotion_recognition };
std::string_view to_string(ExampleSource s);
ExampleSource parse_example_source(std::string_view s);

/// One in-context example answer: a stylized response to a query in a given
/// emotion, optionally with reasoning texts for CoT prompting.
struct ExampleEntry {
    std::string query_id;
    EmotionLabel emotion = EmotionLabel::anger; // never neutral
    ExampleSource source = ExampleSource::human;
    std::string text;
    std::optional<std::string> reasoning_auto;
    std::optional<std::string> reasoning_manual;
    std::optional<std::string> author_id;

    void validate() const;
    /// Index key: "query_id/emotion/source".
    std::string key() const;
};

enum class Technique { vanilla, zero_shot, zero_shot_cot, few_shot, cot };
std::string_view to_string(Technique t);
Technique parse_technique(std::string_view s);

enum class Delimiter { none, triple_hashtag, xml_tag, triple_quote };
std::string_view to_string(Delimiter d);
Delimiter parse_delimiter(std::string_view s);

enum class CotPlacement { user_single, user_three_step_json, system };
std::string_view to_string(CotPlacement p);
CotPlacement parse_cot_placement(std::string_view s);

enum class ExampleOrder { as_given, alphabetical_by_emotion };
std::string_view to_string(ExampleOrder o);
ExampleOrder parse_example_order(std::string_view s);

enum class ReasoningMode { automatic, manual };
std::string_view to_string(ReasoningMode m);
ReasoningMode parse_reasoning_mode(std::string_view m);

/// An example entry paired with the text of the query it answers. Rendering
/// example user messages needs the question wording, which lives in a
/// separate query corpus; specs carry the resolved pair.
struct SpecExample {
    ExampleEntry entry;
    std::string query_text;
};

/// A fully resolved prompting-approach variant.
///
/// For a distinct-emotion spec the example list may hold a pool spanning
/// several emotions; resolve_for() narrows it to the requested target before
/// rendering, which is where the one-emotion invariant is enforced.
struct PromptSpec {
    std::string approach_id;
    std::string stage;
    Technique technique = Technique::vanilla;
    std::string instruction; // template with {emotion} and {query}
    std::optional<std::string> system_template;
    Delimiter delimiter = Delimiter::none;
    std::optional<std::string> persona; // system message text, {emotion} allowed
    std::optional<CotPlacement> cot_placement;
    std::vector<SpecExample> examples;
    ExampleOrder example_order = ExampleOrder::as_given;
    bool distinct_emotion_only = false;
    std::optional<ReasoningMode> reasoning_mode;

    void validate() const;

    /// Render-ready spec for one target emotion: filters the example pool
    /// when distinct_emotion_only is set. Throws ValidationError if no
    /// examples remain for the target.
    PromptSpec resolve_for(EmotionLabel target) const;
};

/// Chat-completion request parameters. Paper defaults: temperature 0.0,
/// seed 16; max_tokens capped at 256 only when targeting a fine-tuned model.
struct GenerationParams {
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    int seed = 16;
    std::optional<int> max_tokens;

    static GenerationParams finetuned_defaults(std::string model_id) {
        GenerationParams p;
        p.model = std::move(model_id);
        p.max_tokens = 256;
        return p;
    }
};

enum class ExtractionFlag { clean, fallback_full_text };
std::string_view to_string(ExtractionFlag f);
ExtractionFlag parse_extraction_flag(std::string_view s);

/// One generated answer with its classification and metric values.
struct ResponseRecord {
    std::string approach_id;
    std::string stage;
    std::string query_id;
    QueryKind kind = QueryKind::factual;
    EmotionLabel target_emotion = EmotionLabel::neutral; // neutral for vanilla cells
    std::vector<ChatMessage> messages;
    std::string prompt_digest;
    std::string raw_output;
    std::string extracted_text;
    ExtractionFlag extraction_flag = ExtractionFlag::clean;
    bool truncated = false;
    EmotionDistribution label_distribution;
    EmotionLabel predicted_label = EmotionLabel::neutral;
    std::string classifier;
    std::map<std::string, double> metrics;
    std::optional<std::string> error; // set when the cell failed

    bool failed() const { return error.has_value(); }
    /// Distribution and argmax invariants; skipped for failed cells.
    void validate() const;
};

struct MetricAggregate {
    double mean = 0.0;
    double variance = 0.0; // population variance
    int count = 0;
    int undefined_count = 0;
};

struct EmotionScore {
    std::optional<double> factual;
    std::optional<double> subjective;
    std::optional<double> combined;
};

/// Aggregate of all ResponseRecords for one approach.
struct ApproachResult {
    std::string approach_id;
    std::string stage;
    std::vector<ResponseRecord> records;
    EmotionScore score;
    std::map<std::string, MetricAggregate> quality;
    int failed_cells = 0;
    bool failed = false; // >10% of cells failed

    std::optional<double> combined() const { return score.combined; }
};

// JSON round-trip for the stable record schema (results.jsonl lines and
// corpus files). Keys are the canonical lowercase strings.
void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const Query& q);
void from_json(const nlohmann::json& j, Query& q);
void to_json(nlohmann::json& j, const ExampleEntry& e);
void from_json(const nlohmann::json& j, ExampleEntry& e);
void to_json(nlohmann::json& j, const ResponseRecord& r);
void from_json(const nlohmann::json& j, ResponseRecord& r);

nlohmann::json distribution_to_json(const EmotionDistribution& d);
EmotionDistribution distribution_from_json(const nlohmann::json& j);

} // namespace emosteer
