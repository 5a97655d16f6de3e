#include "emosteer/catalog.hpp"

#include "emosteer/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace emosteer {

namespace {

using nlohmann::json;

const std::set<std::string> kInheritable = {"instruction", "delimiter", "persona", "examples"};

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (known.count(key) == 0) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

VariantDef parse_variant(const json& j, const std::string& where) {
    reject_unknown_keys(j,
                        {"id", "persona", "persona_text", "delimiter", "instruction",
                         "cot_placement", "source", "per_emotion", "total", "example_keys",
                         "order", "distinct", "reasoning_mode"},
                        where);
    VariantDef v;
    v.id = j.at("id").get<std::string>();
    if (j.contains("persona")) v.persona = j["persona"].get<std::string>();
    if (j.contains("persona_text")) v.persona_text = j["persona_text"].get<std::string>();
    if (j.contains("delimiter")) v.delimiter = parse_delimiter(j["delimiter"].get<std::string>());
    if (j.contains("instruction")) v.instruction = j["instruction"].get<std::string>();
    if (j.contains("cot_placement")) {
        v.cot_placement = parse_cot_placement(j["cot_placement"].get<std::string>());
    }
    if (j.contains("source")) v.source = parse_example_source(j["source"].get<std::string>());
    if (j.contains("per_emotion")) v.per_emotion = j["per_emotion"].get<int>();
    if (j.contains("total")) v.total = j["total"].get<int>();
    if (j.contains("example_keys")) {
        v.example_keys = j["example_keys"].get<std::vector<std::string>>();
    }
    if (j.contains("order")) v.order = parse_example_order(j["order"].get<std::string>());
    if (j.contains("distinct")) v.distinct = j["distinct"].get<bool>();
    if (j.contains("reasoning_mode")) {
        v.reasoning_mode = parse_reasoning_mode(j["reasoning_mode"].get<std::string>());
    }
    return v;
}

} // namespace

void Catalog::validate() const {
    if (instruction.empty()) throw ConfigError("catalog: empty base instruction");
    std::set<std::string> stage_names;
    std::set<std::string> approach_ids{"vanilla"};
    for (const auto& stage : stages) {
        if (stage.variants.empty()) {
            throw ConfigError("catalog stage '" + stage.name + "' has no variants");
        }
        if (!stage_names.insert(stage.name).second) {
            throw ConfigError("catalog: duplicate stage name '" + stage.name + "'");
        }
        for (const auto& key : stage.inherit) {
            if (kInheritable.count(key) == 0) {
                throw ConfigError("catalog stage '" + stage.name + "': unknown inherit field '" +
                                  key + "'");
            }
        }
        for (const auto& v : stage.variants) {
            if (v.id.empty()) {
                throw ConfigError("catalog stage '" + stage.name + "' has a variant without id");
            }
            if (!approach_ids.insert(v.id).second) {
                throw ConfigError("catalog: duplicate approach id '" + v.id + "'");
            }
        }
    }
}

const std::map<std::string, std::string>& default_personas() {
    static const std::map<std::string, std::string> personas = {
        {"emotional", "You are a person who is currently experiencing {emotion}."},
        {"expert", "You are an expert in expressing emotions."},
        {"assistant", "You are a helpful assistant skilled in expressing emotions."},
        {"female", "You are a female person."},
        {"male", "You are a male person."},
        {"lisa", "You are Lisa."},
        {"paul", "You are Paul."},
        {"ekman", "You are Paul Ekman, a researcher known as an expert in emotions."},
        {"feldman", "You are Lisa Feldman Barrett, a researcher known as an expert in emotions."},
    };
    return personas;
}

Catalog default_catalog() {
    Catalog catalog;
    catalog.personas = default_personas();

    StageDef instruction_stage;
    instruction_stage.name = "zero_shot_instruction";
    instruction_stage.technique = Technique::zero_shot;
    instruction_stage.variants = {
        {.id = "instruction"},
        {.id = "delimiter_hashtag", .delimiter = Delimiter::triple_hashtag},
        {.id = "delimiter_xml", .delimiter = Delimiter::xml_tag},
        {.id = "delimiter_quote", .delimiter = Delimiter::triple_quote},
    };

    StageDef persona_stage;
    persona_stage.name = "zero_shot_persona";
    persona_stage.technique = Technique::zero_shot;
    persona_stage.inherit = {"instruction", "delimiter"};
    for (const char* name :
         {"emotional", "expert", "assistant", "female", "male", "lisa", "paul", "ekman",
          "feldman"}) {
        VariantDef v;
        v.id = std::string("persona_") + name;
        v.persona = name;
        persona_stage.variants.push_back(std::move(v));
    }

    StageDef cot_placement_stage;
    cot_placement_stage.name = "zero_shot_cot";
    cot_placement_stage.technique = Technique::zero_shot_cot;
    cot_placement_stage.inherit = {"instruction", "delimiter", "persona"};
    cot_placement_stage.variants = {
        {.id = "cot_user_prompt_1", .cot_placement = CotPlacement::user_single},
        {.id = "cot_user_prompt_2", .cot_placement = CotPlacement::user_three_step_json},
        {.id = "cot_system_prompt", .cot_placement = CotPlacement::system},
    };

    StageDef source_stage;
    source_stage.name = "few_shot_source";
    source_stage.technique = Technique::few_shot;
    source_stage.inherit = {"instruction", "delimiter", "persona"};
    source_stage.variants = {
        {.id = "human", .source = ExampleSource::human, .per_emotion = 1,
         .order = ExampleOrder::alphabetical_by_emotion},
        {.id = "llm", .source = ExampleSource::llm, .per_emotion = 1,
         .order = ExampleOrder::alphabetical_by_emotion},
        {.id = "emotion_recognition", .source = ExampleSource::emotion_recognition,
         .per_emotion = 1, .order = ExampleOrder::alphabetical_by_emotion},
    };

    StageDef variation_stage;
    variation_stage.name = "few_shot_variation";
    variation_stage.technique = Technique::few_shot;
    variation_stage.inherit = {"instruction", "delimiter", "persona"};
    variation_stage.variants = {
        {.id = "distinct", .source = ExampleSource::human, .per_emotion = 5, .distinct = true},
    };

    StageDef size_stage;
    size_stage.name = "few_shot_size";
    size_stage.technique = Technique::few_shot;
    size_stage.inherit = {"instruction", "delimiter", "persona"};
    for (int k : {1, 2, 5, 10}) {
        VariantDef v;
        v.id = "size_" + std::to_string(6 * k);
        v.source = ExampleSource::human;
        v.per_emotion = k;
        size_stage.variants.push_back(std::move(v));
    }

    StageDef order_stage;
    order_stage.name = "few_shot_order";
    order_stage.technique = Technique::few_shot;
    order_stage.inherit = {"instruction", "delimiter", "persona"};
    order_stage.variants = {
        {.id = "order_6", .source = ExampleSource::human, .per_emotion = 1,
         .order = ExampleOrder::alphabetical_by_emotion},
        {.id = "order_60", .source = ExampleSource::human, .per_emotion = 10,
         .order = ExampleOrder::alphabetical_by_emotion},
    };

    StageDef cot_stage;
    cot_stage.name = "cot";
    cot_stage.technique = Technique::cot;
    cot_stage.inherit = {"instruction", "delimiter", "persona", "examples"};
    cot_stage.variants = {
        {.id = "cot_automatic", .reasoning_mode = ReasoningMode::automatic},
        {.id = "cot_manual", .reasoning_mode = ReasoningMode::manual},
    };

    catalog.stages = {instruction_stage, persona_stage, cot_placement_stage, source_stage,
                      variation_stage,  size_stage,    order_stage,          cot_stage};
    return catalog;
}

Catalog load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalog file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("catalog " + path.string() + ": " + e.what());
    }
    reject_unknown_keys(j, {"instruction", "personas", "stages"}, "catalog");

    Catalog catalog;
    catalog.personas = default_personas();
    if (j.contains("instruction")) catalog.instruction = j["instruction"].get<std::string>();
    if (j.contains("personas")) {
        for (const auto& [name, text] : j["personas"].items()) {
            catalog.personas[name] = text.get<std::string>();
        }
    }
    for (const auto& stage_json : j.at("stages")) {
        reject_unknown_keys(stage_json, {"name", "technique", "inherit", "variants"},
                            "catalog stage");
        StageDef stage;
        stage.name = stage_json.at("name").get<std::string>();
        stage.technique = parse_technique(stage_json.at("technique").get<std::string>());
        if (stage_json.contains("inherit")) {
            for (const auto& field : stage_json["inherit"]) {
                stage.inherit.insert(field.get<std::string>());
            }
        }
        for (const auto& variant_json : stage_json.at("variants")) {
            stage.variants.push_back(
                parse_variant(variant_json, "catalog stage '" + stage.name + "'"));
        }
        catalog.stages.push_back(std::move(stage));
    }
    catalog.validate();
    return catalog;
}

const Query* QueryTextLookup::find(const std::string& id) const {
    if (main != nullptr) {
        if (const Query* q = main->find(id)) return q;
    }
    if (example_queries != nullptr) {
        if (const Query* q = example_queries->find(id)) return q;
    }
    return nullptr;
}

namespace {

SpecExample resolve_example(const ExampleEntry& entry, const QueryTextLookup& queries) {
    const Query* q = queries.find(entry.query_id);
    if (q == nullptr) {
        throw ConfigError("example '" + entry.key() + "' references unknown query '" +
                          entry.query_id + "'");
    }
    return SpecExample{entry, q->text};
}

std::vector<SpecExample> select_examples(const VariantDef& variant,
                                         const ExampleCollection& examples,
                                         const QueryTextLookup& queries,
                                         const std::string& where) {
    std::vector<SpecExample> selected;
    if (!variant.example_keys.empty()) {
        for (const auto& key : variant.example_keys) {
            const auto it = examples.index.find(key);
            if (it == examples.index.end()) {
                throw ConfigError(where + ": unknown example key '" + key + "'");
            }
            selected.push_back(resolve_example(examples.entries[it->second], queries));
        }
        return selected;
    }
    if (!variant.source) {
        throw ConfigError(where + ": variant needs a source, example_keys, or inherited examples");
    }

    std::vector<const ExampleEntry*> pool;
    for (const auto& entry : examples.entries) {
        if (entry.source == *variant.source) pool.push_back(&entry);
    }
    if (variant.total) {
        // Raw-total mode: the first N entries of the source in corpus order.
        for (const ExampleEntry* entry : pool) {
            if (static_cast<int>(selected.size()) >= *variant.total) break;
            selected.push_back(resolve_example(*entry, queries));
        }
        if (static_cast<int>(selected.size()) < *variant.total) {
            throw ConfigError(where + ": only " + std::to_string(selected.size()) + " of " +
                              std::to_string(*variant.total) + " requested examples available");
        }
        return selected;
    }

    const int per_emotion = variant.per_emotion.value_or(1);
    for (EmotionLabel e : target_emotions()) {
        int taken = 0;
        for (const ExampleEntry* entry : pool) {
            if (entry->emotion != e) continue;
            selected.push_back(resolve_example(*entry, queries));
            if (++taken == per_emotion) break;
        }
        if (taken < per_emotion) {
            throw ConfigError(where + ": source '" + std::string(to_string(*variant.source)) +
                              "' has only " + std::to_string(taken) + " example(s) for '" +
                              std::string(to_string(e)) + "', need " +
                              std::to_string(per_emotion));
        }
    }
    return selected;
}

} // namespace

PromptSpec instantiate_variant(const Catalog& catalog, const StageDef& stage,
                               const VariantDef& variant, const PromptSpec* carried,
                               const PromptSpec* example_donor,
                               const ExampleCollection& examples, const QueryTextLookup& queries) {
    const std::string where = "stage '" + stage.name + "' variant '" + variant.id + "'";

    PromptSpec spec;
    spec.approach_id = variant.id;
    spec.stage = stage.name;
    spec.technique = stage.technique;
    spec.instruction = catalog.instruction;

    if (carried != nullptr) {
        if (stage.inherit.count("instruction") > 0) spec.instruction = carried->instruction;
        if (stage.inherit.count("delimiter") > 0) spec.delimiter = carried->delimiter;
        if (stage.inherit.count("persona") > 0) spec.persona = carried->persona;
    }
    if (stage.inherit.count("examples") > 0 && !variant.source && variant.example_keys.empty()) {
        const PromptSpec* donor =
            (carried != nullptr && !carried->examples.empty()) ? carried : example_donor;
        if (donor == nullptr || donor->examples.empty()) {
            throw ConfigError(where + ": no earlier approach provides examples to inherit");
        }
        spec.examples = donor->examples;
        spec.example_order = donor->example_order;
        spec.distinct_emotion_only = donor->distinct_emotion_only;
    }

    if (variant.instruction) spec.instruction = *variant.instruction;
    if (variant.delimiter) spec.delimiter = *variant.delimiter;
    if (variant.persona_text) {
        spec.persona = *variant.persona_text;
    } else if (variant.persona) {
        const auto it = catalog.personas.find(*variant.persona);
        if (it == catalog.personas.end()) {
            throw ConfigError(where + ": unknown persona '" + *variant.persona + "'");
        }
        spec.persona = it->second;
    }
    if (variant.cot_placement) spec.cot_placement = *variant.cot_placement;
    if (variant.order) spec.example_order = *variant.order;
    if (variant.distinct) spec.distinct_emotion_only = true;
    if (variant.reasoning_mode) spec.reasoning_mode = *variant.reasoning_mode;

    if ((stage.technique == Technique::few_shot || stage.technique == Technique::cot) &&
        (variant.source || !variant.example_keys.empty())) {
        spec.examples = select_examples(variant, examples, queries, where);
    }

    spec.validate();
    return spec;
}

} // namespace emosteer
