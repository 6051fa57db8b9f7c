#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spump/protocol.hpp"

namespace spump {

/// Parse failure with 1-based position.
struct ConfigParseError : std::runtime_error {
    ConfigParseError(int line, int column, const std::string& msg);
    int line, column;
};

/// Semantic failure naming the offending key.
struct ConfigValidationError : std::invalid_argument {
    ConfigValidationError(const std::string& key, const std::string& msg);
    std::string key;
};

/// Everything needed to reproduce a run.
struct RunConfig {
    Experiment experiment;
    std::string preset;  // name of the preset this config started from, if any
    std::string out_dir = ".";
    std::string variant = "thermal_4x";  // rate-model preparation-rate formula
    unsigned long long seed = 0;         // reserved; the pipeline is deterministic

    /// Checks parameters and schedules; throws ConfigValidationError.
    void validate() const;
};

/// Plain-text format: one `key = value [unit]` per line, `#` starts a
/// comment. Values without a unit are in SI (rad/s, 1/s, s).
///
///   units: khz_2pi hz_2pi rad_per_s per_s   (rates / angular frequencies)
///          us_1e ms_1e                       (1/e times -> rate 1/t)
///          us ms s                           (durations)
///          frac_omega_s                      (scattering rates relative to omega_s)
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Applies one `key=value [unit]` override on top of a config.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Canonical SI text; parse_config(serialize(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// Bundled presets: "continuous_fig2", "stepwise_fig3".
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();
/// Preset source text (unit-annotated, as a user would write it).
std::string preset_text(const std::string& name);

/// Every resolved setting as ordered key/value pairs.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

}  // namespace spump
