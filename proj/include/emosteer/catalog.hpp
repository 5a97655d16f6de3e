#pragma once

#include "emosteer/corpus.hpp"
#include "emosteer/domain.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emosteer {

/// One approach variant inside a stage. Unset fields fall back to the stage's
/// inherited values (from the carried-best spec) or to the catalog base.
struct VariantDef {
    std::string id;
    std::optional<std::string> persona;      // name in the persona table
    std::optional<std::string> persona_text; // literal text, wins over persona
    std::optional<Delimiter> delimiter;
    std::optional<std::string> instruction;
    std::optional<CotPlacement> cot_placement;
    std::optional<ExampleSource> source;
    std::optional<int> per_emotion; // k examples per target emotion
    std::optional<int> total;       // raw-total selection mode
    std::vector<std::string> example_keys; // explicit "query_id/emotion/source" keys
    std::optional<ExampleOrder> order;
    bool distinct = false;
    std::optional<ReasoningMode> reasoning_mode;
};

struct StageDef {
    std::string name;
    Technique technique = Technique::zero_shot;
    /// Fields copied from the carried-best spec before variant overrides:
    /// any of "instruction", "delimiter", "persona", "examples".
    std::set<std::string> inherit;
    std::vector<VariantDef> variants;
};

/// The declared optimization plan: base instruction, persona table, and the
/// ordered technique stages.
struct Catalog {
    std::string instruction{"Answer the following question expressing {emotion}. {query}"};
    std::map<std::string, std::string> personas;
    std::vector<StageDef> stages;

    void validate() const;
};

/// Shipped persona wording. The paper's public prompt collection is the
/// authoritative source; these defaults are replaceable via the catalog file.
const std::map<std::string, std::string>& default_personas();

/// The built-in plan mirroring the optimization sequence: zero-shot
/// instruction/delimiters, nine personas, three CoT placements, few-shot
/// sources/variation/sizes/orders, then CoT reasoning modes.
Catalog default_catalog();

Catalog load_catalog(const std::filesystem::path& path);

/// Resolves query ids against the evaluation corpus first, then the reserved
/// example-query corpus.
struct QueryTextLookup {
    const QueryCorpus* main = nullptr;
    const QueryCorpus* example_queries = nullptr;

    const Query* find(const std::string& id) const;
};

/// Materializes one variant into a render-ready PromptSpec. `carried` is the
/// carried-best spec (may be null before the first selection); `example_donor`
/// is the best spec seen so far that carries examples, used when a stage
/// inherits examples.
PromptSpec instantiate_variant(const Catalog& catalog, const StageDef& stage,
                               const VariantDef& variant, const PromptSpec* carried,
                               const PromptSpec* example_donor,
                               const ExampleCollection& examples, const QueryTextLookup& queries);

} // namespace emosteer
