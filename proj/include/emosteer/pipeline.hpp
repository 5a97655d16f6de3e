#pragma once

#include "emosteer/catalog.hpp"
#include "emosteer/classifier.hpp"
#include "emosteer/corpus.hpp"
#include "emosteer/domain.hpp"
#include "emosteer/gateway.hpp"
#include "emosteer/metrics.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emosteer {

struct RunApproachOptions {
    const TokenEmbedder* embedder = nullptr; // null: no semantic-similarity metric
    /// query_id -> vanilla response text, the fixed similarity reference.
    const std::map<std::string, std::string>* references = nullptr;
    int parallelism = 1;
};

/// Evaluates one approach over the full grid: every query crossed with the
/// six target emotions (vanilla runs one cell per query). Records are
/// ordered by (query id, canonical emotion); per-cell failures are recorded
/// and skipped in scoring, and the run is marked failed when more than 10%
/// of cells fail.
ApproachResult run_approach(const PromptSpec& spec, const QueryCorpus& corpus,
                            ChatBackend& backend, const ClassifierAdapter& classifier,
                            const GenerationParams& params, const RunApproachOptions& opts = {});

/// Predicted-label counts per query kind for the vanilla run.
struct BaselineTable {
    std::map<QueryKind, std::array<int, kLabelCount>> counts;

    std::array<int, kLabelCount> totals() const;
};

std::pair<ApproachResult, BaselineTable> run_baseline(const QueryCorpus& corpus,
                                                      ChatBackend& backend,
                                                      const ClassifierAdapter& classifier,
                                                      const GenerationParams& params,
                                                      const RunApproachOptions& opts = {});

BaselineTable tabulate_baseline(const ApproachResult& vanilla);

/// Approach with the maximum combined Emotion Score; ties break by earliest
/// position. Results without a combined score (failed or vanilla) are not
/// candidates; throws ValidationError if none qualify.
std::string greedy_select(const std::vector<ApproachResult>& results);

struct StageOutcome {
    std::string name;
    std::vector<ApproachResult> results;
    std::string winner;
};

struct PipelineResult {
    ApproachResult baseline;
    BaselineTable baseline_table;
    std::vector<StageOutcome> per_stage;
    std::string carried_best;
    std::optional<double> carried_score;
    bool aborted = false;    // a whole stage produced no usable result
    bool any_failed = false; // at least one approach was marked failed
};

struct PipelineOptions {
    std::filesystem::path output_dir;
    bool resume = false;
    RunApproachOptions run_opts;
    /// Test seam: replaces run_approach when set.
    std::function<ApproachResult(const PromptSpec&)> runner;
    std::ostream* log = nullptr;
};

/// Runs the staged plan with greedy carry-forward: after each stage the
/// carried best updates only if the stage winner's combined score exceeds
/// it. Appends records to results.jsonl and tracks progress in
/// pipeline_state.json so interrupted runs resume at approach granularity.
PipelineResult run_pipeline(const Catalog& catalog, const QueryCorpus& corpus,
                            const QueryCorpus& example_queries, const ExampleCollection& examples,
                            ChatBackend& backend, const ClassifierAdapter& classifier,
                            const GenerationParams& params, const PipelineOptions& opts);

/// Recomputes scores and quality aggregates from raw records (the pure
/// aggregation used on reload and by reporting).
ApproachResult aggregate_approach(const std::string& approach_id, const std::string& stage,
                                  std::vector<ResponseRecord> records);

std::vector<ResponseRecord> load_results(const std::filesystem::path& path);

} // namespace emosteer
