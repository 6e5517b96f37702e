#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slitlab/wavefield.hpp"

namespace slitlab::cli {

// ---------------------------------------------------------------------------
// TOML subset: [tables] (dotted, quoted segments allowed), key = value with
// strings, integers, floats, booleans and (possibly multi-line) arrays.

struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<std::string, std::int64_t, double, bool, Array> data;
    int line = 0;
    int column = 0;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
    bool is_float() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
};

/// Flat document: "table.sub.key" -> value. Table headers are kept so empty
/// tables still register.
struct TomlDocument {
    std::map<std::string, TomlValue> entries;
    std::map<std::string, int> tables;  // dotted table path -> header line
};

/// Throws ConfigError(config_parse) with line/column on malformed input.
TomlDocument parse_toml(std::string_view text);

// ---------------------------------------------------------------------------
// Quantities with explicit unit suffixes.

enum class Dimension { length, energy, frequency, time, mass, velocity };

const char* to_string(Dimension d);

/// "20um", "1.39 MHz", "41neV" -> SI value. Energies come back in joules.
/// Throws ConfigError(config_unit) naming `key` when the unit is missing or
/// does not match the dimension.
double parse_quantity(std::string_view text, Dimension dim, const std::string& key);

/// Shortest round-trip text in the SI base unit ("2e-05m").
std::string format_quantity(double si_value, Dimension dim);

// ---------------------------------------------------------------------------

enum class Command { simulate, buildup, sweep_xb, onset, feasibility, compare };

const char* to_string(Command c);
std::optional<Command> command_from_string(std::string_view s);

struct ScenarioBlock {
    std::string species = "electron";
    std::optional<double> wavelength;  // m
    std::optional<double> energy;      // J, kinetic; converted through de Broglie
    std::optional<double> slit_width;  // m
    std::optional<double> distance;    // m
    wavefield::SourceKind source = wavefield::SourceKind::wide;
    double beam_fwhm = 0.0;            // m
    double beam_offset = 0.0;          // m
    std::optional<wavefield::Kernel> kernel;  // empty = per-source default
    std::uint64_t grid_samples = 65536;
    std::optional<double> grid_spacing;       // m; empty = auto
    double smallness_factor = 10.0;
    bool operator==(const ScenarioBlock&) const = default;
};

struct ModelBlock {
    double gain = 1.0;
    double width_factor = 1.0;
    int sign = -1;
    bool mask = true;
    bool operator==(const ModelBlock&) const = default;
};

struct SamplingBlock {
    std::uint64_t n = 100000;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;  // empty = {n}
    std::uint64_t bins = 64;
    double blur = 0.0;                       // m
    std::string model = "H0";
    bool operator==(const SamplingBlock&) const = default;
};

struct SweepBlock {
    std::uint64_t steps = 9;
    std::uint64_t ensemble_steps = 32;
    std::vector<double> distances;  // m, onset sweep
    double onset_threshold = 0.5;
    bool operator==(const SweepBlock&) const = default;
};

struct FeasibilityBlock {
    std::string species = "Ca+";
    double drop_height = 0.01;
    double slit_width = 200e-9;
    double radial_freq = 1.39e6;
    double axial_freq = 134e3;
    double beam_window = 2e-6;
    double lens_offset_max = 50e-6;
    double margin_factor = 100.0;
    double beam_width = 5e-9;
    double wavelength_factor = 10.0;
    double drift_budget = 2e-9;
    std::optional<double> knockout_vmax;
    double gravity = 9.81;
    bool operator==(const FeasibilityBlock&) const = default;
};

struct OutputBlock {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};
    bool operator==(const OutputBlock&) const = default;
};

struct SpeciesEntry {
    std::string name;
    double mass = 0.0;  // kg
    std::string charge = "neutral";
    bool operator==(const SpeciesEntry&) const = default;
};

struct RunConfig {
    Command command = Command::simulate;
    ScenarioBlock scenario;
    ModelBlock model;
    SamplingBlock sampling;
    SweepBlock sweep;
    FeasibilityBlock feasibility;
    OutputBlock output;
    std::vector<SpeciesEntry> species;
    /// "key = value" for every default filled in; not part of equality.
    std::vector<std::string> defaults_applied;

    bool operator==(const RunConfig& o) const;
};

/// Strict parse: unknown keys, unit-less dimensioned values and
/// command-specific missing fields are errors.
RunConfig parse_config(std::string_view text);

/// Canonical document; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace slitlab::cli
