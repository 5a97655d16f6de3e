#include "emosteer/catalog.hpp"
#include "emosteer/classifier.hpp"
#include "emosteer/corpus.hpp"
#include "emosteer/errors.hpp"
#include "emosteer/finetune.hpp"
#include "emosteer/gateway.hpp"
#include "emosteer/metrics.hpp"
#include "emosteer/pipeline.hpp"
#include "emosteer/prompts.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <memory>

namespace py = pybind11;
using namespace emosteer;

namespace {

py::dict distribution_to_dict(const EmotionDistribution& d) {
    py::dict out;
    for (EmotionLabel e : all_labels()) {
        out[py::str(std::string(to_string(e)))] = d[e];
    }
    return out;
}

class CallbackEmbedder : public TokenEmbedder {
public:
    using Fn = std::function<std::vector<std::vector<double>>(const std::string&)>;
    explicit CallbackEmbedder(Fn fn) : fn_(std::move(fn)) {}
    std::vector<std::vector<double>> embed(const std::string& text) const override {
        return fn_(text);
    }
    std::string name() const override { return "python_callback"; }

private:
    Fn fn_;
};

} // namespace

PYBIND11_MODULE(_emosteer, m) {
    m.doc() = "Emotion-steering prompt evaluation core";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);
    py::register_exception<RenderError>(m, "RenderError", PyExc_ValueError);

    py::enum_<EmotionLabel>(m, "EmotionLabel")
        .value("anger", EmotionLabel::anger)
        .value("disgust", EmotionLabel::disgust)
        .value("fear", EmotionLabel::fear)
        .value("joy", EmotionLabel::joy)
        .value("sadness", EmotionLabel::sadness)
        .value("surprise", EmotionLabel::surprise)
        .value("neutral", EmotionLabel::neutral);

    py::enum_<QueryKind>(m, "QueryKind")
        .value("factual", QueryKind::factual)
        .value("subjective", QueryKind::subjective);

    py::enum_<Role>(m, "Role")
        .value("system", Role::system)
        .value("user", Role::user)
        .value("assistant", Role::assistant);

    py::enum_<ExampleSource>(m, "ExampleSource")
        .value("human", ExampleSource::human)
        .value("llm", ExampleSource::llm)
        .value("emotion_recognition", ExampleSource::emotion_recognition);

    py::enum_<Technique>(m, "Technique")
        .value("vanilla", Technique::vanilla)
        .value("zero_shot", Technique::zero_shot)
        .value("zero_shot_cot", Technique::zero_shot_cot)
        .value("few_shot", Technique::few_shot)
        .value("cot", Technique::cot);

    py::enum_<Delimiter>(m, "Delimiter")
        .value("none", Delimiter::none)
        .value("triple_hashtag", Delimiter::triple_hashtag)
        .value("xml_tag", Delimiter::xml_tag)
        .value("triple_quote", Delimiter::triple_quote);

    py::enum_<CotPlacement>(m, "CotPlacement")
        .value("user_single", CotPlacement::user_single)
        .value("user_three_step_json", CotPlacement::user_three_step_json)
        .value("system", CotPlacement::system);

    py::enum_<ExampleOrder>(m, "ExampleOrder")
        .value("as_given", ExampleOrder::as_given)
        .value("alphabetical_by_emotion", ExampleOrder::alphabetical_by_emotion);

    py::enum_<ReasoningMode>(m, "ReasoningMode")
        .value("automatic", ReasoningMode::automatic)
        .value("manual", ReasoningMode::manual);

    m.def("parse_emotion", [](const std::string& s) { return parse_emotion(s); });
    m.def("emotion_name", [](EmotionLabel e) { return std::string(to_string(e)); });
    m.def("target_emotions", [] {
        return std::vector<EmotionLabel>(target_emotions().begin(), target_emotions().end());
    });

    py::class_<Query>(m, "Query")
        .def(py::init([](std::string id, QueryKind kind, std::string text,
                         std::vector<std::string> gold_keywords) {
                 Query q{std::move(id), kind, std::move(text), std::move(gold_keywords)};
                 q.validate();
                 return q;
             }),
             py::arg("id"), py::arg("kind"), py::arg("text"),
             py::arg("gold_keywords") = std::vector<std::string>{})
        .def_readonly("id", &Query::id)
        .def_readonly("kind", &Query::kind)
        .def_readonly("text", &Query::text)
        .def_readonly("gold_keywords", &Query::gold_keywords);

    py::class_<ChatMessage>(m, "ChatMessage")
        .def(py::init([](Role role, std::string content) {
                 return ChatMessage{role, std::move(content)};
             }),
             py::arg("role"), py::arg("content"))
        .def_readonly("role", &ChatMessage::role)
        .def_readonly("content", &ChatMessage::content)
        .def("__repr__", [](const ChatMessage& msg) {
            return "ChatMessage(" + std::string(to_string(msg.role)) + ", " + msg.content + ")";
        });

    py::class_<ExampleEntry>(m, "ExampleEntry")
        .def(py::init([](std::string query_id, EmotionLabel emotion, ExampleSource source,
                         std::string text, std::optional<std::string> reasoning_auto,
                         std::optional<std::string> reasoning_manual) {
                 ExampleEntry e;
                 e.query_id = std::move(query_id);
                 e.emotion = emotion;
                 e.source = source;
                 e.text = std::move(text);
                 e.reasoning_auto = std::move(reasoning_auto);
                 e.reasoning_manual = std::move(reasoning_manual);
                 e.validate();
                 return e;
             }),
             py::arg("query_id"), py::arg("emotion"), py::arg("source"), py::arg("text"),
             py::arg("reasoning_auto") = std::nullopt, py::arg("reasoning_manual") = std::nullopt)
        .def_readonly("query_id", &ExampleEntry::query_id)
        .def_readonly("emotion", &ExampleEntry::emotion)
        .def_readonly("source", &ExampleEntry::source)
        .def_readonly("text", &ExampleEntry::text);

    py::class_<SpecExample>(m, "SpecExample")
        .def(py::init([](ExampleEntry entry, std::string query_text) {
                 return SpecExample{std::move(entry), std::move(query_text)};
             }),
             py::arg("entry"), py::arg("query_text"))
        .def_readonly("entry", &SpecExample::entry)
        .def_readonly("query_text", &SpecExample::query_text);

    py::class_<PromptSpec>(m, "PromptSpec")
        .def(py::init<>())
        .def_readwrite("approach_id", &PromptSpec::approach_id)
        .def_readwrite("stage", &PromptSpec::stage)
        .def_readwrite("technique", &PromptSpec::technique)
        .def_readwrite("instruction", &PromptSpec::instruction)
        .def_readwrite("delimiter", &PromptSpec::delimiter)
        .def_readwrite("persona", &PromptSpec::persona)
        .def_readwrite("cot_placement", &PromptSpec::cot_placement)
        .def_readwrite("examples", &PromptSpec::examples)
        .def_readwrite("example_order", &PromptSpec::example_order)
        .def_readwrite("distinct_emotion_only", &PromptSpec::distinct_emotion_only)
        .def_readwrite("reasoning_mode", &PromptSpec::reasoning_mode)
        .def("validate", &PromptSpec::validate);

    py::class_<GenerationParams>(m, "GenerationParams")
        .def(py::init<>())
        .def_readwrite("model", &GenerationParams::model)
        .def_readwrite("temperature", &GenerationParams::temperature)
        .def_readwrite("seed", &GenerationParams::seed)
        .def_readwrite("max_tokens", &GenerationParams::max_tokens);

    py::class_<RenderedPrompt>(m, "RenderedPrompt")
        .def_readonly("messages", &RenderedPrompt::messages)
        .def_readonly("approach_id", &RenderedPrompt::approach_id)
        .def_readonly("query_id", &RenderedPrompt::query_id)
        .def_readonly("target_emotion", &RenderedPrompt::target_emotion)
        .def("validate", &RenderedPrompt::validate);

    m.def("render_vanilla", &render_vanilla);
    m.def("render_zero_shot", &render_zero_shot);
    m.def("render_zero_shot_cot", &render_zero_shot_cot);
    m.def("render_few_shot", &render_few_shot);
    m.def("render_cot", &render_cot);
    m.def("render_prompt", &render_prompt);
    m.def("default_instruction", [] { return std::string(kDefaultInstruction); });

    m.def("extract_response", [](const std::string& raw, const PromptSpec& spec) {
        const ExtractedResponse extracted = extract_response(raw, spec);
        return py::make_tuple(extracted.text, std::string(to_string(extracted.flag)));
    });

    m.def("preprocess", [](const std::string& text) { return preprocess(text).tokens; });
    m.def("weighted_f1", &weighted_f1);
    m.def("distinct_n", &distinct_n, py::arg("text"), py::arg("n"));
    m.def("flesch_reading_ease", [](const std::string& text) {
        const FleschScore score = flesch_reading_ease(text);
        return py::make_tuple(score.normalized, score.raw);
    });
    m.def("count_syllables", &count_syllables);
    m.def(
        "semantic_similarity",
        [](const std::string& candidate, const std::string& reference,
           const CallbackEmbedder::Fn& embed) {
            const CallbackEmbedder embedder(embed);
            const SimilarityScore score = semantic_similarity(candidate, reference, embedder);
            return py::make_tuple(score.precision, score.recall, score.f1);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("embedder"));
    m.def("hashed_similarity",
          [](const std::string& candidate, const std::string& reference) {
              const HashedNgramEmbedder embedder;
              const SimilarityScore score = semantic_similarity(candidate, reference, embedder);
              return py::make_tuple(score.precision, score.recall, score.f1);
          });
    m.def("keyword_correct",
          [](const std::string& text, const std::vector<std::string>& gold_keywords) {
              Query q{"FQ", QueryKind::factual, "q", gold_keywords};
              q.validate();
              ResponseRecord r;
              r.extracted_text = text;
              return correctness(r, q);
          });

    py::class_<EmotionLexicon>(m, "EmotionLexicon")
        .def("__len__", &EmotionLexicon::size)
        .def("contains", &EmotionLexicon::contains);
    m.def("load_emolex", &load_emolex);
    m.def("emotional_words", &emotional_words);

    py::class_<QueryCorpus>(m, "QueryCorpus")
        .def_readonly("queries", &QueryCorpus::queries)
        .def("__len__", [](const QueryCorpus& c) { return c.queries.size(); });
    m.def("load_queries", &load_queries);

    py::class_<ExampleCollection>(m, "ExampleCollection")
        .def_readonly("entries", &ExampleCollection::entries)
        .def("__len__", [](const ExampleCollection& c) { return c.entries.size(); });
    m.def("load_examples", &load_examples);

    py::class_<LexiconClassifier>(m, "LexiconClassifier")
        .def(py::init<EmotionLexicon, std::size_t>(), py::arg("lexicon"),
             py::arg("token_limit") = 0)
        .def("classify",
             [](const LexiconClassifier& c, const std::string& text) {
                 return distribution_to_dict(c.classify(text).distribution);
             })
        .def("predict", [](const LexiconClassifier& c, const std::string& text) {
            return c.classify(text).distribution.argmax();
        });

    py::class_<MockChatBackend>(m, "MockChatBackend")
        .def(py::init<>())
        .def("complete", [](MockChatBackend& backend, const std::vector<ChatMessage>& messages,
                            const GenerationParams& params) {
            return backend.complete(CompletionRequest{messages, params}).text;
        });

    m.def("request_digest",
          [](const std::vector<ChatMessage>& messages, const GenerationParams& params) {
              return request_digest(CompletionRequest{messages, params});
          });

    m.def(
        "build_finetune_split",
        [](const ExampleCollection& examples, const QueryCorpus& queries,
           const QueryCorpus& example_queries, const PromptSpec& best_spec, int seed) {
            const QueryTextLookup lookup{&queries, &example_queries};
            const FinetuneSplit split = build_finetune_dataset(examples, lookup, best_spec, seed);
            auto to_list = [](const std::vector<FinetuneRecord>& records) {
                std::vector<std::vector<ChatMessage>> out;
                out.reserve(records.size());
                for (const auto& r : records) out.push_back(r.messages);
                return out;
            };
            return py::make_tuple(to_list(split.train), to_list(split.test));
        },
        py::arg("examples"), py::arg("queries"), py::arg("example_queries"),
        py::arg("best_spec"), py::arg("split_seed"));
}
