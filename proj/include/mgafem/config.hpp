#pragma once

#include "mgafem/driver.hpp"
#include "mgafem/fem.hpp"
#include "mgafem/mesh.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mgafem {

struct OutputPaths {
    std::string csv_path;
    std::string report_path;
};

/// Everything one experiment needs: geometry, data, adaptivity parameters,
/// stop rule, ablation mode and output locations.
struct ExperimentConfig {
    DomainSpec domain;
    std::vector<RegionSpec> regions;
    ProblemData problem;
    AdaptiveConfig adapt;
    OutputPaths output;
    std::string source;
};

/// Parses and validates a config document. Unknown keys, wrong types and
/// out-of-range parameters raise InputError carrying "source:line:col".
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::string& path);

struct RunOverrides {
    std::optional<long> max_ndof;
    std::optional<std::string> out_dir;
};

struct RunArtifacts {
    History history;
    std::string csv_path;
    std::string report_path;
};

/// Builds the initial mesh, runs the adaptive loop and writes the CSV and the
/// rate report.
RunArtifacts run_experiment(const ExperimentConfig& config, const RunOverrides& overrides = {});

}  // namespace mgafem
