#include "emosteer/domain.hpp"

#include "emosteer/errors.hpp"

#include <algorithm>

namespace emosteer {

namespace {

template <typename T, std::size_t N>
T parse_enum(std::string_view s, const std::array<std::pair<std::string_view, T>, N>& table,
             std::string_view what) {
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    throw ValidationError("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

} // namespace

std::string_view to_string(QueryKind k) {
    return k == QueryKind::factual ? "factual" : "subjective";
}

QueryKind parse_query_kind(std::string_view s) {
    static const std::array<std::pair<std::string_view, QueryKind>, 2> table = {{
        {"factual", QueryKind::factual},
        {"subjective", QueryKind::subjective},
    }};
    return parse_enum(s, table, "query kind");
}

void Query::validate() const {
    if (id.empty()) throw ValidationError("query id must be non-empty");
    if (text.empty()) throw ValidationError("query '" + id + "': text must be non-empty");
    if (kind == QueryKind::factual) {
        if (gold_keywords.empty()) {
            throw ValidationError("factual query '" + id + "' is missing gold_keywords");
        }
        for (const auto& kw : gold_keywords) {
            if (kw.empty()) throw ValidationError("query '" + id + "': empty gold keyword");
        }
    } else if (!gold_keywords.empty()) {
        throw ValidationError("subjective query '" + id + "' must not carry gold_keywords");
    }
}

std::string_view to_string(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Role parse_role(std::string_view s) {
    static const std::array<std::pair<std::string_view, Role>, 3> table = {{
        {"system", Role::system},
        {"user", Role::user},
        {"assistant", Role::assistant},
    }};
    return parse_enum(s, table, "message role");
}

std::string_view to_string(ExampleSource s) {
    switch (s) {
        case ExampleSource::human: return "human";
        case ExampleSource::llm: return "llm";
        case ExampleSource::emotion_recognition: return "emotion_recognition";
    }
    return "human";
}

ExampleSource parse_example_source(std::string_view s) {
    static const std::array<std::pair<std::string_view, ExampleSource>, 3> table = {{
        {"human", ExampleSource::human},
        {"llm", ExampleSource::llm},
        {"emotion_recognition", ExampleSource::emotion_recognition},
    }};
    return parse_enum(s, table, "example source");
}

void ExampleEntry::validate() const {
    if (query_id.empty()) throw ValidationError("example query_id must be non-empty");
    if (!is_target(emotion)) {
        throw ValidationError("example for query '" + query_id +
                              "' uses neutral; only target emotions are allowed");
    }
    if (text.empty()) throw ValidationError("example '" + key() + "': text must be non-empty");
}

std::string ExampleEntry::key() const {
    return query_id + "/" + std::string(to_string(emotion)) + "/" + std::string(to_string(source));
}

std::string_view to_string(Technique t) {
    switch (t) {
        case Technique::vanilla: return "vanilla";
        case Technique::zero_shot: return "zero_shot";
        case Technique::zero_shot_cot: return "zero_shot_cot";
        case Technique::few_shot: return "few_shot";
        case Technique::cot: return "cot";
    }
    return "vanilla";
}

Technique parse_technique(std::string_view s) {
    static const std::array<std::pair<std::string_view, Technique>, 5> table = {{
        {"vanilla", Technique::vanilla},
        {"zero_shot", Technique::zero_shot},
        {"zero_shot_cot", Technique::zero_shot_cot},
        {"few_shot", Technique::few_shot},
        {"cot", Technique::cot},
    }};
    return parse_enum(s, table, "technique");
}

std::string_view to_string(Delimiter d) {
    switch (d) {
        case Delimiter::none: return "none";
        case Delimiter::triple_hashtag: return "triple_hashtag";
        case Delimiter::xml_tag: return "xml_tag";
        case Delimiter::triple_quote: return "triple_quote";
    }
    return "none";
}

Delimiter parse_delimiter(std::string_view s) {
    static const std::array<std::pair<std::string_view, Delimiter>, 4> table = {{
        {"none", Delimiter::none},
        {"triple_hashtag", Delimiter::triple_hashtag},
        {"xml_tag", Delimiter::xml_tag},
        {"triple_quote", Delimiter::triple_quote},
    }};
    return parse_enum(s, table, "delimiter");
}

std::string_view to_string(CotPlacement p) {
    switch (p) {
        case CotPlacement::user_single: return "user_single";
        case CotPlacement::user_three_step_json: return "user_three_step_json";
        case CotPlacement::system: return "system";
    }
    return "user_single";
}

CotPlacement parse_cot_placement(std::string_view s) {
    static const std::array<std::pair<std::string_view, CotPlacement>, 3> table = {{
        {"user_single", CotPlacement::user_single},
        {"user_three_step_json", CotPlacement::user_three_step_json},
        {"system", CotPlacement::system},
    }};
    return parse_enum(s, table, "cot placement");
}

std::string_view to_string(ExampleOrder o) {
    return o == ExampleOrder::as_given ? "as_given" : "alphabetical_by_emotion";
}

ExampleOrder parse_example_order(std::string_view s) {
    static const std::array<std::pair<std::string_view, ExampleOrder>, 2> table = {{
        {"as_given", ExampleOrder::as_given},
        {"alphabetical_by_emotion", ExampleOrder::alphabetical_by_emotion},
    }};
    return parse_enum(s, table, "example order");
}

std::string_view to_string(ReasoningMode m) {
    return m == ReasoningMode::automatic ? "automatic" : "manual";
}

ReasoningMode parse_reasoning_mode(std::string_view s) {
    static const std::array<std::pair<std::string_view, ReasoningMode>, 2> table = {{
        {"automatic", ReasoningMode::automatic},
        {"manual", ReasoningMode::manual},
    }};
    return parse_enum(s, table, "reasoning mode");
}

void PromptSpec::validate() const {
    if (approach_id.empty()) throw ValidationError("spec approach_id must be non-empty");
    switch (technique) {
        case Technique::vanilla:
            if (!examples.empty() || delimiter != Delimiter::none) {
                throw ValidationError("vanilla spec '" + approach_id +
                                      "' must not carry examples or a delimiter");
            }
            break;
        case Technique::zero_shot:
            break;
        case Technique::zero_shot_cot:
            if (!cot_placement) {
                throw ValidationError("zero_shot_cot spec '" + approach_id +
                                      "' requires cot_placement");
            }
            break;
        case Technique::few_shot:
        case Technique::cot:
            if (examples.empty()) {
                throw ValidationError("spec '" + approach_id + "' requires examples");
            }
            if (technique == Technique::cot && !reasoning_mode) {
                throw ValidationError("cot spec '" + approach_id + "' requires reasoning_mode");
            }
            break;
    }
    if (instruction.empty() && technique != Technique::vanilla) {
        throw ValidationError("spec '" + approach_id + "' has an empty instruction template");
    }
    for (const auto& ex : examples) {
        ex.entry.validate();
        if (ex.query_text.empty()) {
            throw ValidationError("spec '" + approach_id + "': example '" + ex.entry.key() +
                                  "' has no resolved query text");
        }
    }
}

PromptSpec PromptSpec::resolve_for(EmotionLabel target) const {
    if (!distinct_emotion_only) return *this;
    PromptSpec resolved = *this;
    resolved.examples.clear();
    for (const auto& ex : examples) {
        if (ex.entry.emotion == target) resolved.examples.push_back(ex);
    }
    if (resolved.examples.empty()) {
        throw ValidationError("spec '" + approach_id + "': no examples for target emotion '" +
                              std::string(to_string(target)) + "' (distinct_emotion_only)");
    }
    return resolved;
}

std::string_view to_string(ExtractionFlag f) {
    return f == ExtractionFlag::clean ? "clean" : "fallback_full_text";
}

ExtractionFlag parse_extraction_flag(std::string_view s) {
    static const std::array<std::pair<std::string_view, ExtractionFlag>, 2> table = {{
        {"clean", ExtractionFlag::clean},
        {"fallback_full_text", ExtractionFlag::fallback_full_text},
    }};
    return parse_enum(s, table, "extraction flag");
}

void ResponseRecord::validate() const {
    if (failed()) return;
    label_distribution.validate();
    if (label_distribution.argmax() != predicted_label) {
        throw ValidationError("record " + approach_id + "/" + query_id +
                              ": predicted_label is not the distribution argmax");
    }
}

void to_json(nlohmann::json& j, const ChatMessage& m) {
    j = nlohmann::json{{"role", to_string(m.role)}, {"content", m.content}};
}

void from_json(const nlohmann::json& j, ChatMessage& m) {
    m.role = parse_role(j.at("role").get<std::string>());
    m.content = j.at("content").get<std::string>();
}

void to_json(nlohmann::json& j, const Query& q) {
    j = nlohmann::json{{"id", q.id}, {"kind", to_string(q.kind)}, {"text", q.text}};
    if (q.kind == QueryKind::factual) j["gold_keywords"] = q.gold_keywords;
}

void from_json(const nlohmann::json& j, Query& q) {
    q.id = j.at("id").get<std::string>();
    q.kind = parse_query_kind(j.at("kind").get<std::string>());
    q.text = j.at("text").get<std::string>();
    q.gold_keywords.clear();
    if (j.contains("gold_keywords")) {
        q.gold_keywords = j.at("gold_keywords").get<std::vector<std::string>>();
    }
}

void to_json(nlohmann::json& j, const ExampleEntry& e) {
    j = nlohmann::json{
        {"query_id", e.query_id},
        {"emotion", to_string(e.emotion)},
        {"source", to_string(e.source)},
        {"text", e.text},
    };
    if (e.reasoning_auto) j["reasoning_auto"] = *e.reasoning_auto;
    if (e.reasoning_manual) j["reasoning_manual"] = *e.reasoning_manual;
    if (e.author_id) j["author_id"] = *e.author_id;
}

void from_json(const nlohmann::json& j, ExampleEntry& e) {
    e.query_id = j.at("query_id").get<std::string>();
    e.emotion = parse_emotion(j.at("emotion").get<std::string>());
    e.source = parse_example_source(j.at("source").get<std::string>());
    e.text = j.at("text").get<std::string>();
    e.reasoning_auto.reset();
    e.reasoning_manual.reset();
    e.author_id.reset();
    if (j.contains("reasoning_auto")) e.reasoning_auto = j.at("reasoning_auto").get<std::string>();
    if (j.contains("reasoning_manual")) {
        e.reasoning_manual = j.at("reasoning_manual").get<std::string>();
    }
    if (j.contains("author_id")) e.author_id = j.at("author_id").get<std::string>();
}

nlohmann::json distribution_to_json(const EmotionDistribution& d) {
    nlohmann::json j = nlohmann::json::object();
    for (EmotionLabel e : all_labels()) {
        j[std::string(to_string(e))] = d[e];
    }
    return j;
}

EmotionDistribution distribution_from_json(const nlohmann::json& j) {
    EmotionDistribution d;
    for (EmotionLabel e : all_labels()) {
        d[e] = j.at(std::string(to_string(e))).get<double>();
    }
    return d;
}

void to_json(nlohmann::json& j, const ResponseRecord& r) {
    j = nlohmann::json{
        {"approach_id", r.approach_id},
        {"stage", r.stage},
        {"query_id", r.query_id},
        {"kind", to_string(r.kind)},
        {"target_emotion", to_string(r.target_emotion)},
        {"messages", r.messages},
        {"prompt_digest", r.prompt_digest},
        {"raw_output", r.raw_output},
        {"extracted_text", r.extracted_text},
        {"extraction_flag", to_string(r.extraction_flag)},
        {"truncated", r.truncated},
        {"label_distribution", distribution_to_json(r.label_distribution)},
        {"predicted_label", to_string(r.predicted_label)},
        {"classifier", r.classifier},
        {"metrics", r.metrics},
    };
    if (r.error) j["error"] = *r.error;
}

void from_json(const nlohmann::json& j, ResponseRecord& r) {
    r.approach_id = j.at("approach_id").get<std::string>();
    r.stage = j.value("stage", std::string{});
    r.query_id = j.at("query_id").get<std::string>();
    r.kind = parse_query_kind(j.at("kind").get<std::string>());
    r.target_emotion = parse_emotion(j.at("target_emotion").get<std::string>());
    r.messages = j.at("messages").get<std::vector<ChatMessage>>();
    r.prompt_digest = j.value("prompt_digest", std::string{});
    r.raw_output = j.at("raw_output").get<std::string>();
    r.extracted_text = j.at("extracted_text").get<std::string>();
    r.extraction_flag = parse_extraction_flag(j.at("extraction_flag").get<std::string>());
    r.truncated = j.value("truncated", false);
    r.label_distribution = distribution_from_json(j.at("label_distribution"));
    r.predicted_label = parse_emotion(j.at("predicted_label").get<std::string>());
    r.classifier = j.value("classifier", std::string{});
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.error.reset();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
}

} // namespace emosteer
