#pragma once

#include "emosteer/catalog.hpp"
#include "emosteer/corpus.hpp"
#include "emosteer/domain.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace emosteer {

/// One chat fine-tuning record: exactly [system, user, assistant].
struct FinetuneRecord {
    std::vector<ChatMessage> messages;
};

struct StratumCount {
    int train = 0;
    int test = 0;
};

struct FinetuneSplit {
    std::vector<FinetuneRecord> train;
    std::vector<FinetuneRecord> test;
    std::map<std::string, StratumCount> strata; // "emotion/kind" -> counts
    int split_seed = 0;
    std::string approach_id;
};

/// Builds the fine-tuning dataset from the example collection: system and
/// user prompts derive from `best_spec` (the designated best zero-shot
/// approach), the assistant message is the example text. The 80/20 split is
/// stratified jointly by (emotion, query kind) and deterministic for a fixed
/// seed; a stratum whose size is not divisible by 5 raises ValidationError
/// naming it.
FinetuneSplit build_finetune_dataset(const ExampleCollection& examples,
                                     const QueryTextLookup& queries, const PromptSpec& best_spec,
                                     int split_seed);

struct FinetunePaths {
    std::filesystem::path train;
    std::filesystem::path test;
    std::filesystem::path manifest;
};

/// Writes finetune_train.jsonl / finetune_test.jsonl ({"messages": [...]}
/// per line) and a manifest with the stratum counts. Byte-identical for
/// identical splits.
FinetunePaths write_finetune_files(const FinetuneSplit& split,
                                   const std::filesystem::path& output_dir);

} // namespace emosteer
