#pragma once

#include "emosteer/corpus.hpp"
#include "emosteer/domain.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace emosteer {

class ChatBackend;

/// Template wording shipped with the harness. Instruction and persona texts
/// are configuration-replaceable; these are the defaults.
inline constexpr std::string_view kVanillaPersona = "You are a helpful assistant.";
inline constexpr std::string_view kSubjectiveTaskPrefix =
    "Write a text of 100 words based on the following task. ";
inline constexpr std::string_view kDefaultInstruction =
    "Answer the following question expressing {emotion}. {query}";
inline constexpr std::string_view kReasoningInstruction =
    "Reason step-by-step how your response expresses the specified emotion.";
inline constexpr std::string_view kThreeStepTemplate =
    "First, answer the following question expressing {emotion}. {query}. "
    "Secondly, reason step-by-step how your response expresses the specified emotion. "
    "Thirdly, format your response as a JSON object with the keys \"response\" and "
    "\"reasoning\".";

/// The message sequence for one (approach, query, emotion) cell.
struct RenderedPrompt {
    std::vector<ChatMessage> messages;
    std::string approach_id;
    std::string query_id;
    EmotionLabel target_emotion = EmotionLabel::neutral; // neutral for vanilla

    /// Structural invariants: at most one system message and it is first;
    /// examples alternate user/assistant; the final message is a user one.
    void validate() const;
};

/// Replaces {emotion}/{query} style placeholders in one pass. Inserted
/// values are never rescanned. Unknown `{word}` placeholders raise
/// RenderError; brace content that is not a bare word passes through.
std::string substitute_placeholders(std::string_view tpl,
                                    const std::map<std::string, std::string>& values);

/// Wraps the query text in the spec's delimiter (query portion only).
std::string wrap_query(const std::string& query_text, Delimiter delimiter);

RenderedPrompt render_vanilla(const Query& query);
RenderedPrompt render_zero_shot(const PromptSpec& spec, const Query& query, EmotionLabel emotion);
RenderedPrompt render_zero_shot_cot(const PromptSpec& spec, const Query& query,
                                    EmotionLabel emotion);
RenderedPrompt render_few_shot(const PromptSpec& spec, const Query& query, EmotionLabel emotion);
RenderedPrompt render_cot(const PromptSpec& spec, const Query& query, EmotionLabel emotion);

/// Dispatch on spec.technique. For vanilla the emotion argument is ignored.
RenderedPrompt render_prompt(const PromptSpec& spec, const Query& query, EmotionLabel emotion);

struct ExtractedResponse {
    std::string text;
    ExtractionFlag flag = ExtractionFlag::clean;
};

/// For the three-step JSON variant, pulls the `response` field out of the
/// first JSON object in `raw`; anything unparseable falls back to the full
/// text with a flag. All other techniques pass `raw` through unchanged.
ExtractedResponse extract_response(const std::string& raw, const PromptSpec& spec);

/// Meta-prompt version for automatically generated reasoning texts.
inline constexpr int kAutoReasoningPromptVersion = 1;

/// Asks the backend to explain how an example text expresses its emotion and
/// memoizes the reply by (example key, meta-prompt version). Thread-safe.
class AutoReasoner {
public:
    AutoReasoner(ChatBackend& backend, GenerationParams params);

    std::string generate(const ExampleEntry& example);

private:
    ChatBackend& backend_;
    GenerationParams params_;
    std::mutex mutex_;
    std::map<std::string, std::string> cache_;
};

/// Manually identified stylistic features of an example answer.
struct FeatureAnnotations {
    std::vector<std::string> interjections;
    std::vector<std::string> constructions;
    std::vector<std::string> graphical;
};

/// Deterministic reasoning text built from the annotated factors plus
/// lexicon hits; factors are mentioned only when non-empty.
std::string compose_manual_reasoning(const ExampleEntry& example, const EmotionLexicon& lexicon,
                                     const FeatureAnnotations& annotations);

} // namespace emosteer
