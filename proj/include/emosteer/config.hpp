#pragma once

#include "emosteer/domain.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emosteer {

struct BackendConfig {
    std::string kind = "mock"; // mock | http
    std::string base_url;
    std::string api_key_env; // environment variable holding the key
    int parallelism = 4;
    int timeout_seconds = 120;
    std::optional<std::filesystem::path> cache_dir; // default: <output_dir>/cache
    std::optional<std::filesystem::path> fixtures;  // mock fixture table (digest -> text)
};

struct ClassifierConfig {
    std::string kind = "lexicon"; // lexicon | remote | transformer
    std::string base_url;
    std::filesystem::path model_dir;
    std::vector<std::string> command; // transformer worker argv; {model_dir} substituted
    int token_limit = 512;
};

struct EmbedderConfig {
    std::string kind = "hashed"; // hashed | none
    int dim = 64;
};

struct FinetuneConfig {
    std::string best_approach = "persona_paul";
    int split_seed = 16;
};

/// The complete run configuration, parsed from a JSON file with ${VAR}
/// environment interpolation in string values. Unknown keys are rejected at
/// every level; everything is validated before any network call.
struct RunConfig {
    std::filesystem::path queries;
    std::optional<std::filesystem::path> example_queries;
    std::optional<std::filesystem::path> examples;
    std::optional<std::filesystem::path> emolex;
    std::optional<std::filesystem::path> catalog;
    std::filesystem::path output_dir = "out";
    BackendConfig backend;
    ClassifierConfig classifier;
    EmbedderConfig embedder;
    GenerationParams generation;
    FinetuneConfig finetune;

    /// Structural checks plus input-file existence.
    void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Replaces every ${NAME} with the environment value; unset variables raise
/// ConfigError.
std::string interpolate_env(const std::string& value);

} // namespace emosteer
