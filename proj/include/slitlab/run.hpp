#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slitlab/config.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/hypothesis.hpp"
#include "slitlab/quantities.hpp"

namespace slitlab::cli {

inline constexpr const char* tool_version = "0.1.0";

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;   // overrides output.directory
    std::optional<std::uint64_t> seed;              // overrides sampling.seed
    std::optional<std::vector<std::string>> formats;
};

struct OutputRecord {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string tool = "slitlab";
    std::string version = tool_version;
    std::string command;
    std::string config_digest;
    std::string hash_algorithm = "SHA-256";
    std::uint64_t seed = 0;
    std::vector<OutputRecord> outputs;
    bool ok = true;
    std::string failed_stage;
    std::string error;
    std::optional<ErrorKind> error_kind;
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> defaults_applied;
    /// Console text for commands that have one (feasibility); not serialized.
    std::string summary;

    nlohmann::json to_json() const;
    bool validation_failure() const;
};

/// Species table with the built-ins plus the config's registrations.
quantities::SpeciesTable species_table(const RunConfig& config);

/// Scenario for the config's [scenario] block. Energies go through the
/// relativistic de Broglie relation.
hypothesis::Scenario build_scenario(const RunConfig& config);

hypothesis::DeflectionModel build_model(const RunConfig& config);

/// Runs the configured command and writes its outputs, then manifest.json.
/// Pipeline failures are captured in the returned manifest, not thrown.
RunManifest run(const RunConfig& config, const RunOptions& options = {});

}  // namespace slitlab::cli
