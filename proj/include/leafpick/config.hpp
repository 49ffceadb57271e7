#pragma once

#include <stdexcept>
#include <string>

#include "leafpick/canopy_synth.hpp"
#include "leafpick/retrieval_sim.hpp"

namespace leafpick {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Effective pipeline configuration: one section per module config plus the
/// distance profile that selects defaults. Unknown keys in a config file
/// are rejected.
struct PipelineConfig {
    Profile profile = Profile::indoor;
    PreprocessConfig preprocess;
    ClusteringParams clustering;
    LeafFilterConfig filter;
    WorkspaceSpec workspace;
    ChamberSpec chamber;
    SceneSpec synth;
    SimParams sim;

    TrialConfig trial_config() const {
        return {preprocess, clustering, filter, workspace, chamber, sim};
    }
};

/// Profile-specific defaults for the distance-indexed parameters.
PipelineConfig default_config(Profile profile);

/// INI-style key/value text with [section] headers. parse applies the file
/// on top of the profile defaults (a `profile` key in the file switches
/// the baseline first).
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config_file(const std::string& path);
std::string dump_config(const PipelineConfig& config);

}  // namespace leafpick
