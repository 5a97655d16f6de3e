#include "emosteer/config.hpp"

#include "emosteer/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>

namespace emosteer {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (known.count(key) == 0) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

std::string get_string(const json& j, const char* key) {
    return interpolate_env(j.at(key).get<std::string>());
}

std::string get_string_or(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    return interpolate_env(j.at(key).get<std::string>());
}

void require_file(const std::filesystem::path& path, const std::string& what) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError(what + " file does not exist: " + path.string());
    }
}

} // namespace

std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        const auto open = value.find("${", i);
        if (open == std::string::npos) {
            out.append(value.substr(i));
            break;
        }
        out.append(value.substr(i, open - i));
        const auto close = value.find('}', open + 2);
        if (close == std::string::npos) {
            throw ConfigError("unterminated ${...} in config value: " + value);
        }
        const std::string name = value.substr(open + 2, close - open - 2);
        const char* resolved = std::getenv(name.c_str());
        if (resolved == nullptr) {
            throw ConfigError("environment variable '" + name + "' is not set");
        }
        out.append(resolved);
        i = close + 1;
    }
    return out;
}

void RunConfig::validate() const {
    if (queries.empty()) throw ConfigError("config: 'queries' path is required");
    require_file(queries, "queries");
    if (example_queries) require_file(*example_queries, "example_queries");
    if (examples) require_file(*examples, "examples");
    if (emolex) require_file(*emolex, "emolex");
    if (catalog) require_file(*catalog, "catalog");

    if (backend.kind != "mock" && backend.kind != "http") {
        throw ConfigError("config: backend.kind must be 'mock' or 'http', got '" + backend.kind +
                          "'");
    }
    if (backend.kind == "http" && backend.base_url.empty()) {
        throw ConfigError("config: backend.base_url is required for the http backend");
    }
    if (backend.parallelism < 1) throw ConfigError("config: backend.parallelism must be >= 1");
    if (backend.fixtures) require_file(*backend.fixtures, "mock fixtures");

    if (classifier.kind != "lexicon" && classifier.kind != "remote" &&
        classifier.kind != "transformer") {
        throw ConfigError("config: classifier.kind must be lexicon, remote, or transformer");
    }
    if (classifier.kind == "lexicon" && !emolex) {
        throw ConfigError("config: the lexicon classifier requires an 'emolex' path");
    }
    if (classifier.kind == "remote" && classifier.base_url.empty()) {
        throw ConfigError("config: classifier.base_url is required for the remote classifier");
    }
    if (classifier.kind == "transformer" && classifier.command.empty()) {
        throw ConfigError("config: classifier.command is required for the transformer classifier");
    }

    if (embedder.kind != "hashed" && embedder.kind != "none") {
        throw ConfigError("config: embedder.kind must be 'hashed' or 'none'");
    }
    if (generation.model.empty()) throw ConfigError("config: generation.model must be non-empty");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }

    reject_unknown_keys(j,
                        {"queries", "example_queries", "examples", "emolex", "catalog",
                         "output_dir", "backend", "classifier", "embedder", "generation",
                         "finetune"},
                        "config");

    RunConfig config;
    config.queries = get_string(j, "queries");
    if (j.contains("example_queries")) {
        config.example_queries = get_string(j, "example_queries");
    }
    if (j.contains("examples")) config.examples = get_string(j, "examples");
    if (j.contains("emolex")) config.emolex = get_string(j, "emolex");
    if (j.contains("catalog")) config.catalog = get_string(j, "catalog");
    config.output_dir = get_string_or(j, "output_dir", "out");

    if (j.contains("backend")) {
        const auto& b = j["backend"];
        reject_unknown_keys(
            b, {"kind", "base_url", "api_key_env", "parallelism", "timeout_seconds", "cache_dir",
                "fixtures"},
            "config backend");
        config.backend.kind = get_string_or(b, "kind", "mock");
        config.backend.base_url = get_string_or(b, "base_url", "");
        config.backend.api_key_env = get_string_or(b, "api_key_env", "");
        if (b.contains("parallelism")) config.backend.parallelism = b["parallelism"].get<int>();
        if (b.contains("timeout_seconds")) {
            config.backend.timeout_seconds = b["timeout_seconds"].get<int>();
        }
        if (b.contains("cache_dir")) config.backend.cache_dir = get_string(b, "cache_dir");
        if (b.contains("fixtures")) config.backend.fixtures = get_string(b, "fixtures");
    }

    if (j.contains("classifier")) {
        const auto& c = j["classifier"];
        reject_unknown_keys(c, {"kind", "base_url", "model_dir", "command", "token_limit"},
                            "config classifier");
        config.classifier.kind = get_string_or(c, "kind", "lexicon");
        config.classifier.base_url = get_string_or(c, "base_url", "");
        if (c.contains("model_dir")) config.classifier.model_dir = get_string(c, "model_dir");
        if (c.contains("command")) {
            for (const auto& arg : c["command"]) {
                config.classifier.command.push_back(interpolate_env(arg.get<std::string>()));
            }
        }
        if (c.contains("token_limit")) config.classifier.token_limit = c["token_limit"].get<int>();
    }

    if (j.contains("embedder")) {
        const auto& e = j["embedder"];
        reject_unknown_keys(e, {"kind", "dim"}, "config embedder");
        config.embedder.kind = get_string_or(e, "kind", "hashed");
        if (e.contains("dim")) config.embedder.dim = e["dim"].get<int>();
    }

    if (j.contains("generation")) {
        const auto& g = j["generation"];
        reject_unknown_keys(g, {"model", "temperature", "seed", "max_tokens"},
                            "config generation");
        config.generation.model = get_string_or(g, "model", config.generation.model);
        if (g.contains("temperature")) {
            config.generation.temperature = g["temperature"].get<double>();
        }
        if (g.contains("seed")) config.generation.seed = g["seed"].get<int>();
        if (g.contains("max_tokens") && !g["max_tokens"].is_null()) {
            config.generation.max_tokens = g["max_tokens"].get<int>();
        }
    }

    if (j.contains("finetune")) {
        const auto& f = j["finetune"];
        reject_unknown_keys(f, {"best_approach", "split_seed"}, "config finetune");
        config.finetune.best_approach =
            get_string_or(f, "best_approach", config.finetune.best_approach);
        if (f.contains("split_seed")) config.finetune.split_seed = f["split_seed"].get<int>();
    }

    return config;
}

} // namespace emosteer
