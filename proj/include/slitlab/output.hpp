#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "slitlab/detector.hpp"
#include "slitlab/feasibility.hpp"
#include "slitlab/hypothesis.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/profile.hpp"
#include "slitlab/wavefield.hpp"

namespace slitlab::io {

using nlohmann::json;

/// "%.11e": 12 significant digits, '.' decimal, C locale.
std::string format_number(double v);

// CSV writers. Column names and order are part of the output contract.
std::string profile_csv(const IntensityProfile& p);                         // x_m,intensity
std::string field_csv(const wavefield::ComplexField& f);                   // x_m,re,im
std::string events_csv(const std::vector<detector::DetectionEvent>& ev);   // index,x_m
std::string onset_csv(const std::vector<hypothesis::OnsetRow>& rows);
std::string compare_csv(const hypothesis::Comparison& c);                  // x_m,h0,h1,difference
std::string checks_csv(const feasibility::FeasibilityReport& r);

struct SweepIndexRow {
    int step = 0;
    double x_b = 0.0;
    double x_p = 0.0;
    double d = 0.0;
    int mode_count = 0;
    std::string file;
};
std::string sweep_index_csv(const std::vector<SweepIndexRow>& rows);

extern const char* const profile_header;
extern const char* const field_header;
extern const char* const events_header;
extern const char* const onset_header;
extern const char* const compare_header;
extern const char* const sweep_index_header;
extern const char* const checks_header;

json features_json(const pattern::PatternFeatures& f);
json buildup_json(const detector::BuildUp& b);
json feasibility_json(const feasibility::FeasibilityReport& r);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

// ---------------------------------------------------------------------------
// SVG

struct Curve {
    IntensityProfile profile;
    std::string label;
};

struct Panel {
    std::vector<Curve> curves;
    std::optional<pattern::PatternFeatures> features;  // markers drawn when present
    std::string title;
};

/// Self-contained SVG. One panel draws a single plot; several are laid out as
/// small multiples, each in its own <g class="panel">. x axis in SI-prefixed
/// metres, y axis relative to the panel peak.
std::string emit_plot(const std::vector<Panel>& panels, const std::string& title,
                      const std::string& version);

/// Bar chart of one BuildUp checkpoint.
std::string emit_histogram(const detector::BuildUp& b, std::size_t checkpoint,
                           const std::string& version);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Picks the SI prefix that keeps |span| in [1, 1000): {scale, "um"}.
std::pair<double, std::string> si_prefix_for(double span);

}  // namespace slitlab::io
