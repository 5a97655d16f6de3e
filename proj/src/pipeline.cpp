#include "emosteer/pipeline.hpp"

#include "emosteer/errors.hpp"
#include "emosteer/prompts.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace emosteer {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

struct Cell {
    const Query* query = nullptr;
    EmotionLabel emotion = EmotionLabel::neutral;
};

ResponseRecord evaluate_cell(const PromptSpec& spec, const Cell& cell, ChatBackend& backend,
                             const ClassifierAdapter& classifier, const GenerationParams& params,
                             const RunApproachOptions& opts) {
    ResponseRecord record;
    record.approach_id = spec.approach_id;
    record.stage = spec.stage;
    record.query_id = cell.query->id;
    record.kind = cell.query->kind;
    record.target_emotion = cell.emotion;
    record.classifier = classifier.name();

    try {
        const RenderedPrompt prompt = render_prompt(spec, *cell.query, cell.emotion);
        record.messages = prompt.messages;

        CompletionRequest request{prompt.messages, params};
        record.prompt_digest = request_digest(request);
        const CompletionResult completion = backend.complete(request);
        record.raw_output = completion.text;

        const ExtractedResponse extracted = extract_response(completion.text, spec);
        record.extracted_text = extracted.text;
        record.extraction_flag = extracted.flag;

        if (trimmed(record.extracted_text).empty()) {
            record.error = "backend returned an empty response";
            return record;
        }

        const ClassifyResult classified = classifier.classify(record.extracted_text);
        record.label_distribution = classified.distribution;
        record.predicted_label = classified.distribution.argmax();
        record.truncated = classified.truncated;

        if (const auto d1 = distinct_n(record.extracted_text, 1)) {
            record.metrics["distinct1"] = *d1;
        }
        if (const auto d2 = distinct_n(record.extracted_text, 2)) {
            record.metrics["distinct2"] = *d2;
        }
        const FleschScore fres = flesch_reading_ease(record.extracted_text);
        record.metrics["fres"] = fres.normalized;
        record.metrics["fres_raw"] = fres.raw;
        if (cell.query->kind == QueryKind::factual) {
            record.metrics["correct"] = correctness(record, *cell.query) ? 1.0 : 0.0;
        }
        if (opts.embedder != nullptr && opts.references != nullptr) {
            const auto ref = opts.references->find(cell.query->id);
            if (ref != opts.references->end() && !ref->second.empty()) {
                const SimilarityScore sim =
                    semantic_similarity(record.extracted_text, ref->second, *opts.embedder);
                record.metrics["bertscore_f1"] = sim.f1;
            }
        }
    } catch (const std::exception& e) {
        record.error = e.what();
    }
    return record;
}

void aggregate_metric(ApproachResult& result, const std::string& key) {
    std::vector<double> values;
    int undefined = 0;
    for (const auto& r : result.records) {
        if (r.failed()) continue;
        const auto it = r.metrics.find(key);
        if (it == r.metrics.end()) {
            ++undefined;
        } else {
            values.push_back(it->second);
        }
    }
    if (values.empty() && undefined == 0) return; // metric not applicable at all
    MetricAggregate agg;
    agg.count = static_cast<int>(values.size());
    agg.undefined_count = undefined;
    if (!values.empty()) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        agg.mean = mean;
        agg.variance = var;
    }
    result.quality[key] = agg;
}

void finalize_result(ApproachResult& result, bool vanilla) {
    result.failed_cells = 0;
    for (const auto& r : result.records) {
        if (r.failed()) ++result.failed_cells;
    }
    const auto total = static_cast<int>(result.records.size());
    result.failed = total > 0 && result.failed_cells * 10 > total;

    const bool any_ok = result.failed_cells < total;
    if (!vanilla && any_ok) {
        result.score = emotion_score(result.records);
    }
    for (const char* key :
         {"distinct1", "distinct2", "fres", "fres_raw", "bertscore_f1", "correct"}) {
        aggregate_metric(result, key);
    }

    // Corpus-pooled distinct values, reported alongside the per-response
    // macro averages.
    std::vector<std::string> texts;
    for (const auto& r : result.records) {
        if (!r.failed()) texts.push_back(r.extracted_text);
    }
    for (int n : {1, 2}) {
        if (const auto pooled = distinct_n_pooled(texts, n)) {
            MetricAggregate agg;
            agg.mean = *pooled;
            agg.count = static_cast<int>(texts.size());
            result.quality["distinct" + std::to_string(n) + "_pooled"] = agg;
        }
    }
}

} // namespace

ApproachResult run_approach(const PromptSpec& spec, const QueryCorpus& corpus,
                            ChatBackend& backend, const ClassifierAdapter& classifier,
                            const GenerationParams& params, const RunApproachOptions& opts) {
    if (corpus.empty()) throw ValidationError("run_approach: empty query corpus");
    spec.validate();

    std::vector<const Query*> queries;
    queries.reserve(corpus.queries.size());
    for (const auto& q : corpus.queries) queries.push_back(&q);
    std::sort(queries.begin(), queries.end(),
              [](const Query* a, const Query* b) { return a->id < b->id; });

    std::vector<Cell> cells;
    const bool vanilla = spec.technique == Technique::vanilla;
    for (const Query* q : queries) {
        if (vanilla) {
            cells.push_back({q, EmotionLabel::neutral});
        } else {
            for (EmotionLabel e : target_emotions()) cells.push_back({q, e});
        }
    }

    ApproachResult result;
    result.approach_id = spec.approach_id;
    result.stage = spec.stage;
    result.records.resize(cells.size());

    const int workers = std::max(1, opts.parallelism);
    if (workers == 1 || cells.size() <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            result.records[i] =
                evaluate_cell(spec, cells[i], backend, classifier, params, opts);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) break;
                result.records[i] =
                    evaluate_cell(spec, cells[i], backend, classifier, params, opts);
            }
        };
        std::vector<std::future<void>> futures;
        const int n = std::min<int>(workers, static_cast<int>(cells.size()));
        futures.reserve(n);
        for (int i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, worker));
        for (auto& f : futures) f.get();
    }

    finalize_result(result, vanilla);
    return result;
}

std::array<int, kLabelCount> BaselineTable::totals() const {
    std::array<int, kLabelCount> total{};
    for (const auto& [kind, row] : counts) {
        for (std::size_t i = 0; i < kLabelCount; ++i) total[i] += row[i];
    }
    return total;
}

BaselineTable tabulate_baseline(const ApproachResult& vanilla) {
    BaselineTable table;
    table.counts[QueryKind::factual] = {};
    table.counts[QueryKind::subjective] = {};
    for (const auto& r : vanilla.records) {
        if (r.failed()) continue;
        ++table.counts[r.kind][static_cast<std::size_t>(r.predicted_label)];
    }
    return table;
}

std::pair<ApproachResult, BaselineTable> run_baseline(const QueryCorpus& corpus,
                                                      ChatBackend& backend,
                                                      const ClassifierAdapter& classifier,
                                                      const GenerationParams& params,
                                                      const RunApproachOptions& opts) {
    PromptSpec spec;
    spec.approach_id = "vanilla";
    spec.stage = "baseline";
    spec.technique = Technique::vanilla;
    ApproachResult result = run_approach(spec, corpus, backend, classifier, params, opts);
    BaselineTable table = tabulate_baseline(result);
    return {std::move(result), std::move(table)};
}

std::string greedy_select(const std::vector<ApproachResult>& results) {
    if (results.empty()) throw ValidationError("greedy_select: no results");
    const ApproachResult* best = nullptr;
    for (const auto& r : results) {
        if (r.failed || !r.score.combined) continue;
        if (best == nullptr || *r.score.combined > *best->score.combined) best = &r;
    }
    if (best == nullptr) {
        throw ValidationError("greedy_select: no result carries a combined Emotion Score");
    }
    return best->approach_id;
}

ApproachResult aggregate_approach(const std::string& approach_id, const std::string& stage,
                                  std::vector<ResponseRecord> records) {
    ApproachResult result;
    result.approach_id = approach_id;
    result.stage = stage;
    result.records = std::move(records);
    const bool vanilla = std::all_of(result.records.begin(), result.records.end(),
                                     [](const ResponseRecord& r) {
                                         return r.target_emotion == EmotionLabel::neutral;
                                     });
    finalize_result(result, vanilla);
    return result;
}

std::vector<ResponseRecord> load_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open results file: " + path.string());
    std::vector<ResponseRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            records.push_back(json::parse(line).get<ResponseRecord>());
        } catch (const std::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct PipelineState {
    std::vector<std::string> completed_order;
    std::map<std::string, std::string> stage_of; // approach -> stage
    bool finished = false;

    bool contains(const std::string& id) const { return stage_of.count(id) > 0; }
};

PipelineState load_state(const std::filesystem::path& path) {
    PipelineState state;
    std::ifstream in(path);
    if (!in) return state;
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        return state; // unreadable state: start over
    }
    for (const auto& entry : j.value("completed", json::array())) {
        const auto id = entry.at("approach_id").get<std::string>();
        state.completed_order.push_back(id);
        state.stage_of[id] = entry.value("stage", std::string{});
    }
    state.finished = j.value("finished", false);
    return state;
}

void save_state(const PipelineState& state, const std::filesystem::path& path) {
    json completed = json::array();
    for (const auto& id : state.completed_order) {
        completed.push_back({{"approach_id", id}, {"stage", state.stage_of.at(id)}});
    }
    json j;
    j["completed"] = completed;
    j["finished"] = state.finished;
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

class ResultStore {
public:
    ResultStore(const std::filesystem::path& output_dir, bool resume)
        : results_path_(output_dir / "results.jsonl"),
          state_path_(output_dir / "pipeline_state.json") {
        std::filesystem::create_directories(output_dir);
        if (resume) {
            state_ = load_state(state_path_);
            if (std::filesystem::exists(results_path_)) {
                for (auto& record : load_results(results_path_)) {
                    records_by_approach_[record.approach_id].push_back(std::move(record));
                }
            }
        } else {
            std::ofstream truncate(results_path_, std::ios::trunc);
            state_ = PipelineState{};
            save_state(state_, state_path_);
        }
    }

    bool has(const std::string& id) const { return state_.contains(id); }

    ApproachResult reload(const std::string& id) const {
        const auto it = records_by_approach_.find(id);
        std::vector<ResponseRecord> records =
            it == records_by_approach_.end() ? std::vector<ResponseRecord>{} : it->second;
        return aggregate_approach(id, state_.stage_of.at(id), std::move(records));
    }

    void store(const ApproachResult& result) {
        std::ofstream out(results_path_, std::ios::app);
        if (!out) throw ValidationError("cannot write " + results_path_.string());
        for (const auto& record : result.records) {
            out << json(record).dump() << '\n';
        }
        state_.completed_order.push_back(result.approach_id);
        state_.stage_of[result.approach_id] = result.stage;
        save_state(state_, state_path_);
    }

    void mark_finished() {
        state_.finished = true;
        save_state(state_, state_path_);
    }

private:
    std::filesystem::path results_path_;
    std::filesystem::path state_path_;
    PipelineState state_;
    std::map<std::string, std::vector<ResponseRecord>> records_by_approach_;
};

} // namespace

PipelineResult run_pipeline(const Catalog& catalog, const QueryCorpus& corpus,
                            const QueryCorpus& example_queries, const ExampleCollection& examples,
                            ChatBackend& backend, const ClassifierAdapter& classifier,
                            const GenerationParams& params, const PipelineOptions& opts) {
    catalog.validate();
    ResultStore store(opts.output_dir, opts.resume);
    const QueryTextLookup lookup{&corpus, &example_queries};
    auto log = [&](const std::string& message) {
        if (opts.log != nullptr) *opts.log << message << '\n';
    };

    auto run_or_load = [&](const PromptSpec& spec) -> ApproachResult {
        if (store.has(spec.approach_id)) {
            log("reusing completed approach '" + spec.approach_id + "'");
            return store.reload(spec.approach_id);
        }
        ApproachResult result =
            opts.runner ? opts.runner(spec)
                        : run_approach(spec, corpus, backend, classifier, params, opts.run_opts);
        store.store(result);
        return result;
    };

    PipelineResult pipeline;

    PromptSpec vanilla_spec;
    vanilla_spec.approach_id = "vanilla";
    vanilla_spec.stage = "baseline";
    vanilla_spec.technique = Technique::vanilla;
    pipeline.baseline = run_or_load(vanilla_spec);
    pipeline.baseline_table = tabulate_baseline(pipeline.baseline);

    std::map<std::string, std::string> references;
    for (const auto& r : pipeline.baseline.records) {
        if (!r.failed()) references[r.query_id] = r.extracted_text;
    }
    RunApproachOptions run_opts = opts.run_opts;
    run_opts.references = &references;
    PipelineOptions effective = opts;
    effective.run_opts = run_opts;

    auto run_or_load_steered = [&](const PromptSpec& spec) -> ApproachResult {
        if (store.has(spec.approach_id)) {
            log("reusing completed approach '" + spec.approach_id + "'");
            return store.reload(spec.approach_id);
        }
        ApproachResult result =
            opts.runner
                ? opts.runner(spec)
                : run_approach(spec, corpus, backend, classifier, params, effective.run_opts);
        store.store(result);
        return result;
    };

    std::optional<PromptSpec> carried_spec;
    std::optional<double> carried_score;
    std::string carried_id;
    std::optional<PromptSpec> example_donor;
    std::optional<double> donor_score;

    AutoReasoner auto_reasoner(backend, params);

    for (const auto& stage : catalog.stages) {
        StageOutcome outcome;
        outcome.name = stage.name;
        std::map<std::string, PromptSpec> stage_specs;

        for (const auto& variant : stage.variants) {
            PromptSpec spec;
            try {
                spec = instantiate_variant(catalog, stage, variant,
                                           carried_spec ? &*carried_spec : nullptr,
                                           example_donor ? &*example_donor : nullptr, examples,
                                           lookup);
                if (spec.technique == Technique::cot && spec.reasoning_mode) {
                    for (auto& ex : spec.examples) {
                        if (*spec.reasoning_mode == ReasoningMode::automatic &&
                            !ex.entry.reasoning_auto) {
                            ex.entry.reasoning_auto = auto_reasoner.generate(ex.entry);
                        }
                        if (*spec.reasoning_mode == ReasoningMode::manual &&
                            !ex.entry.reasoning_manual) {
                            throw ValidationError("example '" + ex.entry.key() +
                                                  "' has no manual reasoning text");
                        }
                    }
                }
            } catch (const std::exception& e) {
                log("approach '" + variant.id + "' skipped: " + e.what());
                ApproachResult failed;
                failed.approach_id = variant.id;
                failed.stage = stage.name;
                failed.failed = true;
                outcome.results.push_back(std::move(failed));
                pipeline.any_failed = true;
                continue;
            }

            ApproachResult result = run_or_load_steered(spec);
            if (result.failed) {
                log("approach '" + spec.approach_id + "' failed (" +
                    std::to_string(result.failed_cells) + " failed cells)");
                pipeline.any_failed = true;
            }
            stage_specs[spec.approach_id] = spec;
            outcome.results.push_back(std::move(result));
        }

        try {
            outcome.winner = greedy_select(outcome.results);
        } catch (const ValidationError&) {
            log("stage '" + stage.name + "' produced no usable result; aborting");
            pipeline.per_stage.push_back(std::move(outcome));
            pipeline.aborted = true;
            break;
        }

        const ApproachResult* winner = nullptr;
        for (const auto& r : outcome.results) {
            if (r.approach_id == outcome.winner) winner = &r;
        }
        // Carry-forward policy: best-so-far overall. A weaker stage never
        // replaces the carried best.
        if (winner != nullptr && winner->score.combined &&
            (!carried_score || *winner->score.combined > *carried_score)) {
            carried_score = winner->score.combined;
            carried_id = winner->approach_id;
            carried_spec = stage_specs.at(winner->approach_id);
        }
        // Track the best example-carrying spec for stages that inherit
        // examples (the carried best may be example-free).
        for (const auto& r : outcome.results) {
            if (r.failed || !r.score.combined) continue;
            const auto it = stage_specs.find(r.approach_id);
            if (it == stage_specs.end() || it->second.examples.empty()) continue;
            if (!donor_score || *r.score.combined > *donor_score) {
                donor_score = r.score.combined;
                example_donor = it->second;
            }
        }
        pipeline.per_stage.push_back(std::move(outcome));
    }

    pipeline.carried_best = carried_id;
    pipeline.carried_score = carried_score;
    if (!pipeline.aborted) store.mark_finished();
    return pipeline;
}

} // namespace emosteer
