#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "censel/data.hpp"
#include "censel/harness.hpp"

namespace censel {

/// Experiment document accepted by `censel run`.
struct RunConfig {
    ExperimentConfig experiment;
    std::filesystem::path dataset;
    std::string time_col = "time";
    std::string event_col = "event";
    std::filesystem::path output_dir = "censel-out";
    std::size_t workers = 1;
    bool seed_given = false;
};

/// Parses a run configuration. Relative paths resolve against `base_dir`.
/// Unknown keys are rejected.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Synthetic-data document accepted by `censel synth`: either a "preset"
/// ("mas-like", "adni-like") or explicit n, p, relevant, target_censoring,
/// correlation and seed.
SynthConfig parse_synth_config(const std::string& text);
SynthConfig synth_preset(const std::string& name);

/// Entry point behind the `censel` executable. Exit codes: 0 success, 1 a cell
/// failed, 2 bad configuration or input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace censel
