#pragma once

// Declarative experiment configuration (JSON with nested sections). Every
// physics default is pre-filled: T1 = L^2, T0 = T1/8, t_neel = L, uniform priors.

#include "mbl/scaling.hpp"
#include "mbl/sweep.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace mbl {

struct ExperimentConfig {
    SweepConfig              sweep;
    scaling::CollapseOptions analysis;
    unsigned                 threads = 0; // run option; not part of the config hash
};

// Throws ConfigError with "line:column" for syntax errors and the dotted field
// path for schema errors (unknown keys, wrong types, invalid values).
ExperimentConfig parse_config(const std::string &text, const std::string &source = "<config>");
ExperimentConfig load_config(const std::filesystem::path &path);

// Fully resolved configuration, keys sorted. Excludes run options.
nlohmann::json to_json(const ExperimentConfig &config);

// FNV-1a 64 of the canonical resolved JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

} // namespace mbl
