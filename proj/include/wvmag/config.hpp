#pragma once

// Declarative run configuration (TOML). Every physical quantity carries its
// unit in the key name. See configs/default_setup.toml for the full schema.

#include "wvmag/error.hpp"
#include "wvmag/sensitivity.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wvmag {

// A config value is missing, mistyped or violates a module invariant.
// key_path names the offending entry, e.g. "probe.w_nm".
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string key_path, const std::string& message);
    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

struct SpectrumRequest {
    double beta = 0.010;
    double field_T = 1e-9;
};

struct RunConfig {
    ExperimentSetup setup = ExperimentSetup::reference();
    std::vector<double> betas{0.007, 0.010, 0.013};
    FieldSweep sweep;
    SpectrumRequest spectrum;
    std::optional<DesignConstraints> design;
    BetaSearch beta_search;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
};

// Parses TOML text. Missing tables fall back to the reference setup; the
// phase budget is SBC-calibrated on load.
RunConfig parse_config(std::string_view toml_text, std::string_view source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace wvmag
