#include "emosteer/finetune.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/prompts.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>

namespace emosteer {

namespace {

struct StratumEntry {
    const ExampleEntry* entry;
    const Query* query;
};

// Standardized mt19937 output with modulo keeps the shuffle reproducible
// across platforms (std::shuffle is not).
void deterministic_shuffle(std::vector<StratumEntry>& items, std::mt19937& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = gen() % i;
        std::swap(items[i - 1], items[j]);
    }
}

FinetuneRecord make_record(const StratumEntry& item, const PromptSpec& best_spec) {
    const std::string emotion(to_string(item.entry->emotion));
    std::string system = std::string(kVanillaPersona);
    if (best_spec.persona) {
        system = substitute_placeholders(*best_spec.persona, {{"emotion", emotion}});
    }
    const std::string user = substitute_placeholders(
        best_spec.instruction,
        {{"emotion", emotion}, {"query", wrap_query(item.query->text, best_spec.delimiter)}});

    FinetuneRecord record;
    record.messages = {
        {Role::system, system},
        {Role::user, user},
        {Role::assistant, item.entry->text},
    };
    return record;
}

} // namespace

FinetuneSplit build_finetune_dataset(const ExampleCollection& examples,
                                     const QueryTextLookup& queries, const PromptSpec& best_spec,
                                     int split_seed) {
    if (examples.entries.empty()) {
        throw ValidationError("build_finetune_dataset: no examples");
    }

    // Strata in canonical order: emotion (alphabetical) x kind (factual,
    // subjective); entries within a stratum in a fixed total order.
    std::map<std::pair<int, int>, std::vector<StratumEntry>> strata;
    for (const auto& entry : examples.entries) {
        const Query* query = queries.find(entry.query_id);
        if (query == nullptr) {
            throw ValidationError("example '" + entry.key() + "' references unknown query '" +
                                  entry.query_id + "'");
        }
        strata[{static_cast<int>(entry.emotion), static_cast<int>(query->kind)}].push_back(
            {&entry, query});
    }
    for (EmotionLabel e : target_emotions()) {
        const bool present = strata.count({static_cast<int>(e), 0}) > 0 ||
                             strata.count({static_cast<int>(e), 1}) > 0;
        if (!present) {
            throw ValidationError("build_finetune_dataset: no examples for emotion '" +
                                  std::string(to_string(e)) + "'");
        }
    }

    FinetuneSplit split;
    split.split_seed = split_seed;
    split.approach_id = best_spec.approach_id;
    std::mt19937 gen(static_cast<std::mt19937::result_type>(split_seed));

    for (auto& [key, items] : strata) {
        const std::string stratum_name =
            std::string(to_string(static_cast<EmotionLabel>(key.first))) + "/" +
            std::string(to_string(static_cast<QueryKind>(key.second)));
        if (items.size() % 5 != 0) {
            throw ValidationError("stratum '" + stratum_name + "' has " +
                                  std::to_string(items.size()) +
                                  " example(s); a 4:1 train/test split is impossible");
        }
        std::sort(items.begin(), items.end(), [](const StratumEntry& a, const StratumEntry& b) {
            return a.entry->key() < b.entry->key();
        });
        deterministic_shuffle(items, gen);

        const std::size_t test_count = items.size() / 5;
        StratumCount counts;
        for (std::size_t i = 0; i < items.size(); ++i) {
            FinetuneRecord record = make_record(items[i], best_spec);
            if (i < test_count) {
                split.test.push_back(std::move(record));
                ++counts.test;
            } else {
                split.train.push_back(std::move(record));
                ++counts.train;
            }
        }
        split.strata[stratum_name] = counts;
    }
    return split;
}

FinetunePaths write_finetune_files(const FinetuneSplit& split,
                                   const std::filesystem::path& output_dir) {
    std::filesystem::create_directories(output_dir);
    FinetunePaths paths{
        output_dir / "finetune_train.jsonl",
        output_dir / "finetune_test.jsonl",
        output_dir / "finetune_manifest.json",
    };

    auto write_records = [](const std::vector<FinetuneRecord>& records,
                            const std::filesystem::path& path) {
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write " + path.string());
        for (const auto& record : records) {
            out << nlohmann::json{{"messages", record.messages}}.dump() << '\n';
        }
    };
    write_records(split.train, paths.train);
    write_records(split.test, paths.test);

    nlohmann::json manifest;
    manifest["approach"] = split.approach_id;
    manifest["split_seed"] = split.split_seed;
    manifest["train_total"] = split.train.size();
    manifest["test_total"] = split.test.size();
    nlohmann::json strata = nlohmann::json::object();
    for (const auto& [name, counts] : split.strata) {
        strata[name] = {{"train", counts.train}, {"test", counts.test}};
    }
    manifest["strata"] = strata;
    std::ofstream out(paths.manifest);
    if (!out) throw ValidationError("cannot write " + paths.manifest.string());
    out << manifest.dump(2) << '\n';
    return paths;
}

} // namespace emosteer
