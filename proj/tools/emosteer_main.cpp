#include "emosteer/catalog.hpp"
#include "emosteer/classifier.hpp"
#include "emosteer/config.hpp"
#include "emosteer/corpus.hpp"
#include "emosteer/errors.hpp"
#include "emosteer/finetune.hpp"
#include "emosteer/gateway.hpp"
#include "emosteer/metrics.hpp"
#include "emosteer/pipeline.hpp"
#include "emosteer/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace emosteer;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::shared_ptr<ChatBackend> build_backend(const RunConfig& config) {
    std::shared_ptr<ChatBackend> inner;
    if (config.backend.kind == "mock") {
        std::map<std::string, std::string> fixtures;
        if (config.backend.fixtures) {
            std::ifstream in(*config.backend.fixtures);
            nlohmann::json j;
            in >> j;
            for (const auto& [digest, text] : j.items()) {
                fixtures[digest] = text.get<std::string>();
            }
        }
        inner = std::make_shared<MockChatBackend>(std::move(fixtures));
    } else {
        HttpBackendOptions options;
        options.base_url = config.backend.base_url;
        options.parallelism = config.backend.parallelism;
        options.timeout_seconds = config.backend.timeout_seconds;
        if (!config.backend.api_key_env.empty()) {
            if (const char* key = std::getenv(config.backend.api_key_env.c_str())) {
                options.api_key = key;
            } else {
                throw ConfigError("environment variable '" + config.backend.api_key_env +
                                  "' (backend.api_key_env) is not set");
            }
        }
        inner = std::make_shared<HttpChatBackend>(std::move(options));
    }
    const auto cache_dir = config.backend.cache_dir.value_or(config.output_dir / "cache");
    return std::make_shared<CachingBackend>(std::move(inner), cache_dir);
}

std::unique_ptr<ClassifierAdapter> build_classifier(const RunConfig& config) {
    const auto limit = static_cast<std::size_t>(std::max(0, config.classifier.token_limit));
    if (config.classifier.kind == "lexicon") {
        return std::make_unique<LexiconClassifier>(load_emolex(*config.emolex), limit);
    }
    if (config.classifier.kind == "remote") {
        return std::make_unique<RemoteClassifier>(config.classifier.base_url, limit,
                                                  config.backend.timeout_seconds);
    }
    std::vector<std::string> command;
    for (const auto& arg : config.classifier.command) {
        std::string resolved = arg;
        const std::string placeholder = "{model_dir}";
        if (const auto pos = resolved.find(placeholder); pos != std::string::npos) {
            resolved.replace(pos, placeholder.size(), config.classifier.model_dir.string());
        }
        command.push_back(std::move(resolved));
    }
    return std::make_unique<SubprocessClassifier>(command, limit);
}

std::unique_ptr<TokenEmbedder> build_embedder(const RunConfig& config) {
    if (config.embedder.kind == "none") return nullptr;
    return std::make_unique<HashedNgramEmbedder>(static_cast<std::size_t>(config.embedder.dim));
}

Catalog load_catalog_or_default(const RunConfig& config) {
    return config.catalog ? load_catalog(*config.catalog) : default_catalog();
}

int cmd_run(const RunConfig& config, bool resume) {
    const Catalog catalog = load_catalog_or_default(config);
    const QueryCorpus corpus = load_queries(config.queries);
    const QueryCorpus example_queries =
        config.example_queries ? load_queries(*config.example_queries) : QueryCorpus{};
    const ExampleCollection examples =
        config.examples ? load_examples(*config.examples) : ExampleCollection{};

    const auto backend = build_backend(config);
    const auto classifier = build_classifier(config);
    const auto embedder = build_embedder(config);

    PipelineOptions options;
    options.output_dir = config.output_dir;
    options.resume = resume;
    options.run_opts.embedder = embedder.get();
    options.run_opts.parallelism = config.backend.parallelism;
    options.log = &std::cerr;

    const PipelineResult result = run_pipeline(catalog, corpus, example_queries, examples,
                                               *backend, *classifier, config.generation, options);

    const auto records = load_results(config.output_dir / "results.jsonl");
    const auto summaries = summarize_results(records);
    write_summary_csv(summaries, config.output_dir / "summary.csv");
    {
        std::ofstream out(config.output_dir / "baseline_table.txt");
        out << render_baseline_table(result.baseline_table);
    }

    std::cout << render_score_table(summaries);
    std::cout << "\nBaseline dominant emotion distribution:\n"
              << render_baseline_table(result.baseline_table);
    if (!result.carried_best.empty()) {
        std::cout << "\ncarried best: " << result.carried_best;
        if (result.carried_score) std::cout << " (combined " << *result.carried_score << ")";
        std::cout << '\n';
    }

    if (result.aborted) {
        std::cerr << "pipeline aborted; partial results kept in " << config.output_dir.string()
                  << '\n';
        return kExitRuntime;
    }
    if (result.any_failed) {
        std::cerr << "one or more approaches failed; see results for error markers\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_report(const std::filesystem::path& results_path, const std::string& format,
               const std::filesystem::path& output_dir) {
    const auto records = load_results(results_path);
    if (records.empty()) {
        std::cerr << "results file is empty: " << results_path.string() << '\n';
        return kExitRuntime;
    }
    const auto summaries = summarize_results(records);
    if (format == "table") {
        std::cout << render_score_table(summaries);
        return kExitOk;
    }
    std::filesystem::create_directories(output_dir);
    if (format == "csv") {
        const auto path = output_dir / "summary.csv";
        write_summary_csv(summaries, path);
        std::cout << path.string() << '\n';
        return kExitOk;
    }
    const auto scores_path = output_dir / "emotion_scores.svg";
    const auto quality_path = output_dir / "quality_metrics.svg";
    write_emotion_scores_svg(summaries, scores_path);
    write_quality_svg(summaries, quality_path);
    std::cout << scores_path.string() << '\n' << quality_path.string() << '\n';
    return kExitOk;
}

int cmd_classify(const RunConfig& config, const std::string& text) {
    const auto classifier = build_classifier(config);
    const ClassifyResult result = classifier->classify(text);
    for (EmotionLabel e : all_labels()) {
        std::cout << to_string(e) << '\t' << result.distribution[e] << '\n';
    }
    std::cout << "argmax\t" << to_string(result.distribution.argmax()) << '\n';
    return kExitOk;
}

int cmd_build_finetune(const RunConfig& config) {
    if (!config.examples) throw ConfigError("config: 'examples' path is required");
    const Catalog catalog = load_catalog_or_default(config);
    const ExampleCollection examples = load_examples(*config.examples);
    const QueryCorpus corpus = load_queries(config.queries);
    const QueryCorpus example_queries =
        config.example_queries ? load_queries(*config.example_queries) : QueryCorpus{};
    const QueryTextLookup lookup{&corpus, &example_queries};

    const VariantDef* variant = nullptr;
    const StageDef* stage = nullptr;
    for (const auto& s : catalog.stages) {
        for (const auto& v : s.variants) {
            if (v.id == config.finetune.best_approach) {
                variant = &v;
                stage = &s;
            }
        }
    }
    if (variant == nullptr) {
        throw ConfigError("finetune.best_approach '" + config.finetune.best_approach +
                          "' is not in the catalog");
    }
    const PromptSpec best_spec =
        instantiate_variant(catalog, *stage, *variant, nullptr, nullptr, examples, lookup);

    const FinetuneSplit split =
        build_finetune_dataset(examples, lookup, best_spec, config.finetune.split_seed);
    const FinetunePaths paths = write_finetune_files(split, config.output_dir);
    std::cout << "train: " << split.train.size() << " -> " << paths.train.string() << '\n'
              << "test:  " << split.test.size() << " -> " << paths.test.string() << '\n'
              << "manifest: " << paths.manifest.string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion-steering prompt evaluation harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir_flag;
    std::string backend_flag;
    std::string classifier_flag;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        cmd->add_option("-c,--config", config_path, "Run configuration file (JSON)")
            ->required(config_required);
        cmd->add_option("--output-dir", output_dir_flag, "Override the configured output dir");
        cmd->add_option("--backend", backend_flag, "Override backend kind (http|mock)");
        cmd->add_option("--classifier", classifier_flag,
                        "Override classifier kind (transformer|remote|lexicon)");
    };

    auto* run_cmd = app.add_subcommand("run", "Run (or resume) the optimization pipeline");
    bool resume = false;
    add_common(run_cmd, true);
    run_cmd->add_flag("--resume", resume, "Resume from pipeline_state.json");

    auto* report_cmd = app.add_subcommand("report", "Render reports from a results file");
    std::string results_path;
    std::string format = "table";
    std::string report_out = "out";
    report_cmd->add_option("--results", results_path, "results.jsonl path")->required();
    report_cmd->add_option("--format", format, "table|csv|plot");
    report_cmd->add_option("--output-dir", report_out, "Directory for emitted files");

    auto* classify_cmd = app.add_subcommand("classify", "Classify one text and print the labels");
    std::string classify_text;
    std::string adapter_flag;
    classify_cmd->add_option("text", classify_text, "Text to classify")->required();
    classify_cmd->add_option("--adapter", adapter_flag,
                             "Classifier adapter (transformer|remote|lexicon)");
    classify_cmd->add_option("-c,--config", config_path, "Run configuration file (JSON)")
        ->required();

    auto* finetune_cmd =
        app.add_subcommand("build-finetune", "Build the fine-tuning dataset files");
    add_common(finetune_cmd, true);

    auto* validate_cmd = app.add_subcommand("validate-config", "Validate a configuration file");
    validate_cmd->add_option("-c,--config", config_path, "Run configuration file (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_run_config(config_path);
            if (!output_dir_flag.empty()) config.output_dir = output_dir_flag;
            if (!backend_flag.empty()) config.backend.kind = backend_flag;
            if (!classifier_flag.empty()) config.classifier.kind = classifier_flag;
            if (!adapter_flag.empty()) config.classifier.kind = adapter_flag;
            config.validate();
        }

        if (*run_cmd) return cmd_run(config, resume);
        if (*report_cmd) {
            if (format != "table" && format != "csv" && format != "plot") {
                throw ConfigError("unknown report format '" + format + "'");
            }
            return cmd_report(results_path, format, report_out);
        }
        if (*classify_cmd) {
            if (classify_text.find_first_not_of(" \t\r\n") == std::string::npos) {
                throw ConfigError("classify: text must be non-empty");
            }
            return cmd_classify(config, classify_text);
        }
        if (*finetune_cmd) return cmd_build_finetune(config);
        if (*validate_cmd) {
            std::cout << "configuration is valid\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
