#include "emosteer/prompts.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/gateway.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace emosteer {

namespace {

bool is_placeholder_word(std::string_view token) {
    return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::islower(c) != 0 || c == '_';
    });
}

std::string render_system_text(const PromptSpec& spec, EmotionLabel emotion) {
    std::string text;
    if (spec.persona) {
        text = substitute_placeholders(*spec.persona,
                                       {{"emotion", std::string(to_string(emotion))}});
    }
    return text;
}

void append_example_pair(std::vector<ChatMessage>& messages, const PromptSpec& spec,
                         const SpecExample& ex, const std::string& assistant_text) {
    const std::string user = substitute_placeholders(
        spec.instruction, {{"emotion", std::string(to_string(ex.entry.emotion))},
                           {"query", wrap_query(ex.query_text, spec.delimiter)}});
    messages.push_back({Role::user, user});
    messages.push_back({Role::assistant, assistant_text});
}

std::vector<SpecExample> ordered_examples(const PromptSpec& spec) {
    std::vector<SpecExample> ordered = spec.examples;
    if (spec.example_order == ExampleOrder::alphabetical_by_emotion) {
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const SpecExample& a, const SpecExample& b) {
                             return static_cast<int>(a.entry.emotion) <
                                    static_cast<int>(b.entry.emotion);
                         });
    }
    return ordered;
}

std::string reasoning_for(const PromptSpec& spec, const SpecExample& ex) {
    if (!spec.reasoning_mode) {
        throw ValidationError("spec '" + spec.approach_id + "' has no reasoning_mode");
    }
    const auto& chosen = *spec.reasoning_mode == ReasoningMode::automatic
                             ? ex.entry.reasoning_auto
                             : ex.entry.reasoning_manual;
    if (!chosen || chosen->empty()) {
        throw ValidationError("example '" + ex.entry.key() + "' is missing " +
                              std::string(to_string(*spec.reasoning_mode)) + " reasoning text");
    }
    return *chosen;
}

// Span of the first top-level JSON object in `raw`, or npos length 0.
std::pair<std::size_t, std::size_t> first_json_object(const std::string& raw) {
    const std::size_t start = raw.find('{');
    if (start == std::string::npos) return {std::string::npos, 0};
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return {start, i - start + 1};
        }
    }
    return {std::string::npos, 0};
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    return out;
}

} // namespace

void RenderedPrompt::validate() const {
    if (messages.empty()) throw ValidationError("rendered prompt has no messages");
    if (messages.back().role != Role::user) {
        throw ValidationError("rendered prompt must end with a user message");
    }
    std::size_t body_start = 0;
    if (messages.front().role == Role::system) body_start = 1;
    for (std::size_t i = body_start; i < messages.size(); ++i) {
        if (messages[i].role == Role::system) {
            throw ValidationError("system message allowed only in first position");
        }
        const Role expected = ((i - body_start) % 2 == 0) ? Role::user : Role::assistant;
        if (messages[i].role != expected) {
            throw ValidationError("example messages must alternate user/assistant");
        }
    }
    for (const auto& m : messages) {
        if (m.content.empty()) throw ValidationError("rendered prompt contains an empty message");
    }
}

std::string substitute_placeholders(std::string_view tpl,
                                    const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        const std::size_t open = tpl.find('{', i);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(i));
            break;
        }
        out.append(tpl.substr(i, open - i));
        const std::size_t close = tpl.find('}', open + 1);
        if (close == std::string_view::npos) {
            out.append(tpl.substr(open));
            break;
        }
        const std::string_view token = tpl.substr(open + 1, close - open - 1);
        if (const auto it = values.find(std::string(token)); it != values.end()) {
            out += it->second;
        } else if (is_placeholder_word(token)) {
            throw RenderError("unresolved placeholder '{" + std::string(token) + "}'");
        } else {
            out.append(tpl.substr(open, close - open + 1));
        }
        i = close + 1;
    }
    return out;
}

std::string wrap_query(const std::string& query_text, Delimiter delimiter) {
    switch (delimiter) {
        case Delimiter::none: return query_text;
        case Delimiter::triple_hashtag: return "### " + query_text + " ###";
        case Delimiter::xml_tag: return "<query>" + query_text + "</query>";
        case Delimiter::triple_quote: return "\"\"\"" + query_text + "\"\"\"";
    }
    return query_text;
}

RenderedPrompt render_vanilla(const Query& query) {
    RenderedPrompt prompt;
    prompt.approach_id = "vanilla";
    prompt.query_id = query.id;
    prompt.target_emotion = EmotionLabel::neutral;
    prompt.messages.push_back({Role::system, std::string(kVanillaPersona)});
    std::string user = query.text;
    if (query.kind == QueryKind::subjective) {
        user = std::string(kSubjectiveTaskPrefix) + query.text;
    }
    prompt.messages.push_back({Role::user, std::move(user)});
    return prompt;
}

RenderedPrompt render_zero_shot(const PromptSpec& spec, const Query& query, EmotionLabel emotion) {
    if (spec.technique != Technique::zero_shot) {
        throw ValidationError("render_zero_shot: spec '" + spec.approach_id +
                              "' is not a zero_shot spec");
    }
    if (!is_target(emotion)) throw ValidationError("target emotion must not be neutral");

    RenderedPrompt prompt;
    prompt.approach_id = spec.approach_id;
    prompt.query_id = query.id;
    prompt.target_emotion = emotion;
    if (const std::string system = render_system_text(spec, emotion); !system.empty()) {
        prompt.messages.push_back({Role::system, system});
    }
    prompt.messages.push_back(
        {Role::user, substitute_placeholders(
                         spec.instruction, {{"emotion", std::string(to_string(emotion))},
                                            {"query", wrap_query(query.text, spec.delimiter)}})});
    return prompt;
}

RenderedPrompt render_zero_shot_cot(const PromptSpec& spec, const Query& query,
                                    EmotionLabel emotion) {
    if (spec.technique != Technique::zero_shot_cot || !spec.cot_placement) {
        throw ValidationError("render_zero_shot_cot: spec '" + spec.approach_id +
                              "' is not a zero_shot_cot spec with a placement");
    }
    if (!is_target(emotion)) throw ValidationError("target emotion must not be neutral");

    const std::map<std::string, std::string> values = {
        {"emotion", std::string(to_string(emotion))},
        {"query", wrap_query(query.text, spec.delimiter)}};
    const std::string base_user = substitute_placeholders(spec.instruction, values);

    RenderedPrompt prompt;
    prompt.approach_id = spec.approach_id;
    prompt.query_id = query.id;
    prompt.target_emotion = emotion;

    std::string system = render_system_text(spec, emotion);
    std::string user;
    switch (*spec.cot_placement) {
        case CotPlacement::user_single:
            user = base_user + " " + std::string(kReasoningInstruction);
            break;
        case CotPlacement::user_three_step_json:
            user = substitute_placeholders(kThreeStepTemplate, values);
            break;
        case CotPlacement::system:
            system = system.empty() ? std::string(kReasoningInstruction)
                                    : system + " " + std::string(kReasoningInstruction);
            user = base_user;
            break;
    }
    if (!system.empty()) prompt.messages.push_back({Role::system, system});
    prompt.messages.push_back({Role::user, std::move(user)});
    return prompt;
}

RenderedPrompt render_few_shot(const PromptSpec& spec, const Query& query, EmotionLabel emotion) {
    if (spec.technique != Technique::few_shot) {
        throw ValidationError("render_few_shot: spec '" + spec.approach_id +
                              "' is not a few_shot spec");
    }
    if (!is_target(emotion)) throw ValidationError("target emotion must not be neutral");
    if (spec.examples.empty()) {
        throw ValidationError("spec '" + spec.approach_id + "' has no examples");
    }
    if (spec.distinct_emotion_only) {
        for (const auto& ex : spec.examples) {
            if (ex.entry.emotion != emotion) {
                throw ValidationError("spec '" + spec.approach_id +
                                      "': distinct_emotion_only example '" + ex.entry.key() +
                                      "' does not match target emotion");
            }
        }
    }

    RenderedPrompt prompt;
    prompt.approach_id = spec.approach_id;
    prompt.query_id = query.id;
    prompt.target_emotion = emotion;
    if (const std::string system = render_system_text(spec, emotion); !system.empty()) {
        prompt.messages.push_back({Role::system, system});
    }
    for (const auto& ex : ordered_examples(spec)) {
        if (ex.entry.text.empty()) {
            throw ValidationError("example '" + ex.entry.key() + "' has empty text");
        }
        append_example_pair(prompt.messages, spec, ex, ex.entry.text);
    }
    prompt.messages.push_back(
        {Role::user, substitute_placeholders(
                         spec.instruction, {{"emotion", std::string(to_string(emotion))},
                                            {"query", wrap_query(query.text, spec.delimiter)}})});
    return prompt;
}

RenderedPrompt render_cot(const PromptSpec& spec, const Query& query, EmotionLabel emotion) {
    if (spec.technique != Technique::cot) {
        throw ValidationError("render_cot: spec '" + spec.approach_id + "' is not a cot spec");
    }
    PromptSpec as_few_shot = spec;
    as_few_shot.technique = Technique::few_shot;
    // Reasoning is embedded in the assistant messages, so the message count
    // matches the few-shot rendering.
    RenderedPrompt prompt;
    prompt.approach_id = spec.approach_id;
    prompt.query_id = query.id;
    prompt.target_emotion = emotion;
    if (!is_target(emotion)) throw ValidationError("target emotion must not be neutral");
    if (spec.examples.empty()) {
        throw ValidationError("spec '" + spec.approach_id + "' has no examples");
    }
    if (spec.distinct_emotion_only) {
        for (const auto& ex : spec.examples) {
            if (ex.entry.emotion != emotion) {
                throw ValidationError("spec '" + spec.approach_id +
                                      "': distinct_emotion_only example '" + ex.entry.key() +
                                      "' does not match target emotion");
            }
        }
    }
    if (const std::string system = render_system_text(spec, emotion); !system.empty()) {
        prompt.messages.push_back({Role::system, system});
    }
    for (const auto& ex : ordered_examples(spec)) {
        append_example_pair(prompt.messages, as_few_shot, ex,
                            ex.entry.text + "\n\n" + reasoning_for(spec, ex));
    }
    prompt.messages.push_back(
        {Role::user, substitute_placeholders(
                         spec.instruction, {{"emotion", std::string(to_string(emotion))},
                                            {"query", wrap_query(query.text, spec.delimiter)}})});
    return prompt;
}

RenderedPrompt render_prompt(const PromptSpec& spec, const Query& query, EmotionLabel emotion) {
    switch (spec.technique) {
        case Technique::vanilla: {
            RenderedPrompt prompt = render_vanilla(query);
            prompt.approach_id = spec.approach_id;
            return prompt;
        }
        case Technique::zero_shot: return render_zero_shot(spec, query, emotion);
        case Technique::zero_shot_cot: return render_zero_shot_cot(spec, query, emotion);
        case Technique::few_shot: return render_few_shot(spec.resolve_for(emotion), query, emotion);
        case Technique::cot: return render_cot(spec.resolve_for(emotion), query, emotion);
    }
    throw ValidationError("unknown technique");
}

ExtractedResponse extract_response(const std::string& raw, const PromptSpec& spec) {
    if (spec.technique != Technique::zero_shot_cot || !spec.cot_placement ||
        *spec.cot_placement != CotPlacement::user_three_step_json) {
        return {raw, ExtractionFlag::clean};
    }
    const auto [start, length] = first_json_object(raw);
    if (start != std::string::npos) {
        const auto parsed = nlohmann::json::parse(raw.substr(start, length), nullptr, false);
        if (!parsed.is_discarded() && parsed.contains("response") &&
            parsed["response"].is_string()) {
            return {parsed["response"].get<std::string>(), ExtractionFlag::clean};
        }
    }
    return {raw, ExtractionFlag::fallback_full_text};
}

AutoReasoner::AutoReasoner(ChatBackend& backend, GenerationParams params)
    : backend_(backend), params_(std::move(params)) {}

std::string AutoReasoner::generate(const ExampleEntry& example) {
    example.validate();
    const std::string cache_key =
        example.key() + "#v" + std::to_string(kAutoReasoningPromptVersion);
    {
        const std::lock_guard<std::mutex> lock(mutex_);
        if (const auto it = cache_.find(cache_key); it != cache_.end()) return it->second;
    }

    CompletionRequest request;
    request.params = params_;
    request.messages.push_back(
        {Role::user, "Explain step-by-step how the following text expresses " +
                         std::string(to_string(example.emotion)) + ". Text: \"" + example.text +
                         "\""});
    const CompletionResult result = backend_.complete(request);

    const std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(cache_key, result.text).first->second;
}

std::string compose_manual_reasoning(const ExampleEntry& example, const EmotionLexicon& lexicon,
                                     const FeatureAnnotations& annotations) {
    example.validate();
    std::string text =
        "This response expresses " + std::string(to_string(example.emotion)) + ".";
    if (!annotations.interjections.empty()) {
        text += " It uses the interjections " + join(annotations.interjections) + ".";
    }
    const auto charged = emotional_words(example.text, lexicon, example.emotion);
    if (!charged.empty()) {
        text += " It contains the emotionally charged words " + join(charged) + ".";
    }
    if (!annotations.constructions.empty()) {
        text += " It uses emotionally charged constructions such as " +
                join(annotations.constructions) + ".";
    }
    if (!annotations.graphical.empty()) {
        text += " It features graphical modifications such as " + join(annotations.graphical) +
                ".";
    }
    return text;
}

} // namespace emosteer
