#include "slitlab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>

#include "slitlab/detector.hpp"
#include "slitlab/feasibility.hpp"
#include "slitlab/output.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/wavefield.hpp"

namespace slitlab::cli {

namespace fs = std::filesystem;
using hypothesis::Prediction;
using hypothesis::Scenario;
using nlohmann::json;

nlohmann::json RunManifest::to_json() const
{
    json outs = json::array();
    for (const auto& o : outputs)
        outs.push_back({{"name", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    json j = {{"tool", tool},
              {"version", version},
              {"command", command},
              {"config_digest", config_digest},
              {"hash_algorithm", hash_algorithm},
              {"seed", seed},
              {"outputs", outs},
              {"ok", ok},
              {"wall_time_s", wall_time_s},
              {"warnings", warnings},
              {"defaults_applied", defaults_applied}};
    if (!ok) {
        j["failed_stage"] = failed_stage;
        j["error"] = error;
        j["error_kind"] = error_kind ? to_string(*error_kind) : "internal";
    }
    return j;
}

bool RunManifest::validation_failure() const
{
    if (ok || !error_kind)
        return false;
    return Error(*error_kind, "").is_validation();
}

quantities::SpeciesTable species_table(const RunConfig& config)
{
    quantities::SpeciesTable table;
    for (const auto& e : config.species)
        table.add(e.name, e.mass, e.charge);
    return table;
}

Scenario build_scenario(const RunConfig& config)
{
    const auto& sc = config.scenario;
    const auto table = species_table(config);
    Scenario s;
    s.species = table.lookup(sc.species);
    if (sc.wavelength) {
        s.wavelength = *sc.wavelength;
    } else if (sc.energy) {
        const auto& k = quantities::constants();
        if (s.species.massless())
            s.wavelength = k.planck_h * k.light_c / *sc.energy;
        else
            s.wavelength = feasibility::de_broglie(quantities::joule_to_ev(*sc.energy), s.species)
                               .wavelength;
    }
    s.slit_width = sc.slit_width.value_or(0.0);
    s.distance = sc.distance.value_or(0.0);
    if (config.command == Command::onset && !config.sweep.distances.empty())
        s.distance = config.sweep.distances.front();
    s.source = sc.source == wavefield::SourceKind::fine
                   ? wavefield::SourceSpec::fine(sc.beam_fwhm, sc.beam_offset)
                   : wavefield::SourceSpec::wide();
    s.kernel = sc.kernel;
    s.n_samples = static_cast<std::size_t>(sc.grid_samples);
    if (sc.grid_spacing)
        s.grid = wavefield::Grid1D::make(s.n_samples, *sc.grid_spacing);
    s.validate();
    return s;
}

hypothesis::DeflectionModel build_model(const RunConfig& config)
{
    hypothesis::DeflectionModel m;
    m.gain = config.model.gain;
    m.width_factor = config.model.width_factor;
    m.sign = config.model.sign;
    m.mask_enabled = config.model.mask;
    return m;
}

namespace {

// Writes files into the output directory and keeps the manifest's file list.
class Sink {
public:
    Sink(fs::path dir, std::vector<std::string> formats, RunManifest& manifest)
        : dir_(std::move(dir)), formats_(std::move(formats)), manifest_(manifest)
    {
    }

    bool wants(const std::string& format) const
    {
        return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
    }

    void write(const std::string& name, const std::string& content)
    {
        if (name.empty() || name.find('/') != std::string::npos || name.find("..") != std::string::npos)
            throw IoError("refusing to write '" + name + "' outside the output directory");
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + path.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out)
            throw IoError("failed writing " + path.string());
        if (name != "manifest.json")
            manifest_.outputs.push_back({name, io::sha256_hex(content), content.size()});
    }

    void csv(const std::string& name, const std::function<std::string()>& make)
    {
        if (wants("csv"))
            write(name, make());
    }

    void json_file(const std::string& name, const std::function<json()>& make)
    {
        if (wants("json"))
            write(name, io::dump(make()));
    }

    // Plot failures are recorded, never fatal.
    void svg(const std::string& name, const std::function<std::string()>& make)
    {
        if (!wants("svg"))
            return;
        try {
            write(name, make());
        } catch (const std::exception& e) {
            manifest_.warnings.push_back("plot " + name + " skipped: " + e.what());
        }
    }

private:
    fs::path dir_;
    std::vector<std::string> formats_;
    RunManifest& manifest_;
};

// Samples of p inside [lo, hi], renormalized when it carries any weight.
IntensityProfile crop(const IntensityProfile& p, double lo, double hi)
{
    IntensityProfile out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.x[i] >= lo && p.x[i] <= hi) {
            out.x.push_back(p.x[i]);
            out.values.push_back(p.values[i]);
        }
    }
    if (out.size() < 2)
        return p;
    if (out.trapezoid() > 0.0)
        out.normalize();
    return out;
}

// Screen window that holds the interesting part of a prediction.
IntensityProfile screen_view(const Prediction& pred, const Scenario& s)
{
    const double fringe = s.fringe_period();
    double half = std::max(8.0 * fringe, s.slit_width);
    if (pred.model == hypothesis::ModelId::H1) {
        half = std::max(8.0 * fringe, std::abs(pred.x_p.value_or(0.0)) +
                                          4.0 * pred.rendered_fwhm.value_or(0.0));
    } else if (s.source.is_fine()) {
        half = std::max(half, 3.0 * s.wavelength * s.distance / s.source.fwhm) +
               std::abs(s.source.offset);
    }
    return crop(pred.profile, -half, half);
}

json number_or_null(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json scenario_json(const Scenario& s)
{
    json j = {{"species", s.species.name},
              {"wavelength_m", s.wavelength},
              {"slit_width_m", s.slit_width},
              {"distance_m", s.distance},
              {"fresnel_number", s.fresnel_number()},
              {"source", wavefield::to_string(s.source.kind)},
              {"kernel", wavefield::to_string(s.effective_kernel())}};
    if (s.source.is_fine()) {
        j["beam_fwhm_m"] = s.source.fwhm;
        j["beam_offset_m"] = s.source.offset;
    }
    return j;
}

void add_warnings(RunManifest& m, const std::vector<std::string>& w)
{
    for (const auto& s : w)
        if (std::find(m.warnings.begin(), m.warnings.end(), s) == m.warnings.end())
            m.warnings.push_back(s);
}

std::string step_name(std::size_t i, std::size_t total)
{
    const int width = total > 100 ? 3 : 2;
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%0*zu.csv", width, i);
    return buf;
}

// --- commands --------------------------------------------------------------

void run_simulate(const RunConfig&, const Scenario& s, Sink& out, RunManifest& m,
                  std::string& stage)
{
    stage = "simulate";
    const Prediction pred = hypothesis::predict_H0(s);
    add_warnings(m, pred.warnings);
    stage = "write";
    const IntensityProfile view = screen_view(pred, s);
    out.csv("profile.csv", [&] { return io::profile_csv(view); });
    out.json_file("features.json", [&] { return io::features_json(pred.features); });
    out.json_file("report.json", [&] {
        const double expected = 2.0 * s.wavelength * s.distance / s.slit_width;
        json j = {{"scenario", scenario_json(s)},
                  {"W_m", number_or_null(pred.features.W)},
                  {"W_closed_form_m", expected},
                  {"fwhm_m", number_or_null(pattern::fwhm(pred.profile))},
                  {"mode_count", pattern::count_modes(view)}};
        if (pred.features.W) {
            j["W_relative_error"] = std::abs(*pred.features.W - expected) / expected;
            j["uncertainty_product"] = hypothesis::uncertainty_product(pred, s);
        }
        j["warnings"] = pred.warnings;
        return j;
    });
    out.svg("plot.svg", [&] {
        io::Panel panel{{{view, "H0"}}, pred.features, ""};
        return io::emit_plot({panel}, "screen intensity", tool_version);
    });
}

void run_buildup(const RunConfig& c, const Scenario& s, std::uint64_t seed, Sink& out,
                 RunManifest& m, std::string& stage)
{
    stage = "predict";
    const Prediction pred = c.sampling.model == "H1"
                                ? hypothesis::predict_H1(s, build_model(c))
                                : hypothesis::predict_H0(s);
    add_warnings(m, pred.warnings);
    const IntensityProfile view = screen_view(pred, s);

    stage = "sampling";
    std::vector<std::uint64_t> checkpoints = c.sampling.checkpoints;
    if (checkpoints.empty())
        checkpoints = {c.sampling.n};
    detector::SamplerOptions opts;
    opts.blur_sigma = c.sampling.blur;
    const auto built = detector::build_up(view, checkpoints, static_cast<std::size_t>(c.sampling.bins),
                                          seed, opts);
    const auto events = detector::sample_hits(view, checkpoints.back(), seed, opts);

    stage = "write";
    out.csv("profile.csv", [&] { return io::profile_csv(view); });
    out.csv("events.csv", [&] { return io::events_csv(events); });
    out.json_file("buildup.json", [&] { return io::buildup_json(built); });
    out.json_file("features.json", [&] { return io::features_json(pred.features); });
    for (std::size_t i = 0; i < built.checkpoints.size(); ++i)
        out.svg("buildup_" + std::to_string(built.checkpoints[i]) + ".svg",
                [&] { return io::emit_histogram(built, i, tool_version); });
}

void run_sweep(const RunConfig& c, const Scenario& s, Sink& out, RunManifest& m, std::string& stage)
{
    stage = "sweep";
    const auto model = build_model(c);
    const auto steps = hypothesis::sweep_xb(s, model, static_cast<int>(c.sweep.steps));
    std::vector<io::SweepIndexRow> rows;
    std::vector<io::Panel> panels;
    const auto markers = pattern::analytic_features(s.slit_width, s.wavelength, s.distance);

    stage = "write";
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& st = steps[i];
        add_warnings(m, st.prediction.warnings);
        const IntensityProfile view = screen_view(st.prediction, s);
        const std::string name = step_name(i, steps.size());
        out.csv(name, [&] { return io::profile_csv(view); });
        rows.push_back({static_cast<int>(i), st.x_b, st.prediction.x_p.value_or(0.0),
                        st.prediction.d.value_or(0.0), st.mode_count, name});
        char title[64];
        std::snprintf(title, sizeof title, "x_b = %.4g m, modes = %d", st.x_b, st.mode_count);
        panels.push_back({{{view, "H1"}}, markers, title});
    }
    out.csv("index.csv", [&] { return io::sweep_index_csv(rows); });

    stage = "ensemble";
    json ensemble = nullptr;
    try {
        ensemble = hypothesis::ensemble_consistency(s, model, static_cast<int>(c.sweep.ensemble_steps));
    } catch (const Error& e) {
        m.warnings.push_back(std::string("ensemble consistency not computed: ") + e.what());
    }

    stage = "write";
    out.json_file("report.json", [&] {
        json modes = json::array();
        for (const auto& st : steps)
            modes.push_back(st.mode_count);
        return json{{"scenario", scenario_json(s)},
                    {"model",
                     {{"gain", model.gain},
                      {"width_factor", model.width_factor},
                      {"sign", model.sign},
                      {"mask", model.mask_enabled},
                      {"slope", model.slope(s)},
                      {"deflection_coefficient", hypothesis::deflection_coefficient()}}},
                    {"mode_counts", modes},
                    {"ensemble_relative_l2", ensemble}};
    });
    out.svg("plot.svg", [&] { return io::emit_plot(panels, "x_b sweep", tool_version); });
}

void run_onset(const RunConfig& c, const Scenario& s, Sink& out, RunManifest&, std::string& stage)
{
    stage = "onset";
    hypothesis::OnsetOptions opts;
    opts.threshold = c.sweep.onset_threshold;
    opts.kernel = c.scenario.kernel.value_or(wavefield::Kernel::exact);
    const auto rows = hypothesis::fringe_onset_sweep(s, c.sweep.distances, opts);

    stage = "write";
    out.csv("onset.csv", [&] { return io::onset_csv(rows); });
    out.json_file("report.json", [&] {
        json onset = nullptr;
        std::size_t failures = 0;
        for (const auto& r : rows) {
            if (!r.error.empty())
                ++failures;
            if (onset.is_null() && r.below_threshold)
                onset = {{"distance_m", r.distance}, {"fresnel_number", r.fresnel_number}};
        }
        return json{{"scenario", scenario_json(s)},
                    {"threshold", opts.threshold},
                    {"rows", rows.size()},
                    {"failed_rows", failures},
                    {"first_below_threshold", onset}};
    });
}

void run_feasibility(const RunConfig& c, Sink& out, RunManifest& m, std::string& stage)
{
    stage = "feasibility";
    const auto& f = c.feasibility;
    feasibility::DropScenario d;
    d.species = species_table(c).lookup(f.species);
    d.drop_height = f.drop_height;
    d.slit_width = f.slit_width;
    d.radial_freq = f.radial_freq;
    d.axial_freq = f.axial_freq;
    d.beam_window = f.beam_window;
    d.lens_offset_max = f.lens_offset_max;
    d.margin_factor = f.margin_factor;
    d.beam_width = f.beam_width;
    d.wavelength_factor = f.wavelength_factor;
    d.drift_budget = f.drift_budget;
    d.knockout_vmax = f.knockout_vmax;
    d.gravity = f.gravity;
    const auto report = feasibility::evaluate_scenario(d);
    add_warnings(m, report.warnings);
    m.summary = feasibility::format_report(report);

    stage = "write";
    out.json_file("report.json", [&] { return io::feasibility_json(report); });
    out.csv("checks.csv", [&] { return io::checks_csv(report); });
}

void run_compare(const RunConfig& c, const Scenario& s, Sink& out, RunManifest& m,
                 std::string& stage)
{
    stage = "compare";
    const auto cmp = hypothesis::compare_models(s, build_model(c));
    add_warnings(m, cmp.h0.warnings);
    add_warnings(m, cmp.h1.warnings);

    stage = "write";
    out.csv("compare.csv", [&] { return io::compare_csv(cmp); });
    out.json_file("report.json", [&] {
        return json{{"scenario", scenario_json(s)},
                    {"relative_l2", cmp.l2_distance},
                    {"h0_fwhm_m", number_or_null(cmp.h0_fwhm)},
                    {"h1_fwhm_m", number_or_null(cmp.h1_fwhm)},
                    {"h1_x_p_m", number_or_null(cmp.h1.x_p)},
                    {"h1_d_m", number_or_null(cmp.h1.d)},
                    {"h1_uncertainty_product", number_or_null(cmp.h1_uncertainty)}};
    });
    out.svg("plot.svg", [&] {
        IntensityProfile h0{cmp.x, cmp.h0_screen, true};
        IntensityProfile h1{cmp.x, cmp.h1_screen, true};
        io::Panel panel{{{h0, "H0"}, {h1, "H1"}},
                        pattern::analytic_features(s.slit_width, s.wavelength, s.distance),
                        ""};
        return io::emit_plot({panel}, "H0 vs H1", tool_version);
    });
}

}  // namespace

RunManifest run(const RunConfig& config_in, const RunOptions& options)
{
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig config = config_in;
    if (options.seed)
        config.sampling.seed = *options.seed;
    if (options.formats)
        config.output.formats = *options.formats;
    // The output location is not part of the run: config.toml keeps the
    // directory named in the config even when --out or SLITLAB_OUT moves it.
    const fs::path dir = options.out_dir ? *options.out_dir : fs::path(config.output.directory);

    RunManifest m;
    m.command = to_string(config.command);
    m.seed = config.sampling.seed;
    m.defaults_applied = config.defaults_applied;
    // The digest covers the resolved config but not where it is written.
    {
        RunConfig digest_view = config;
        digest_view.output.directory.clear();
        m.config_digest = io::sha256_hex(serialize_config(digest_view));
    }

    std::string stage = "output";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        m.ok = false;
        m.failed_stage = stage;
        m.error = "cannot create output directory " + dir.string();
        m.error_kind = ErrorKind::io;
        return m;
    }
    Sink out(dir, config.output.formats, m);

    try {
        stage = "config";
        out.write("config.toml", serialize_config(config));
        if (config.command == Command::feasibility) {
            run_feasibility(config, out, m, stage);
        } else {
            stage = "scenario";
            const Scenario s = build_scenario(config);
            switch (config.command) {
            case Command::simulate: run_simulate(config, s, out, m, stage); break;
            case Command::buildup: run_buildup(config, s, config.sampling.seed, out, m, stage); break;
            case Command::sweep_xb: run_sweep(config, s, out, m, stage); break;
            case Command::onset: run_onset(config, s, out, m, stage); break;
            case Command::compare: run_compare(config, s, out, m, stage); break;
            case Command::feasibility: break;
            }
        }
    } catch (const Error& e) {
        m.ok = false;
        m.failed_stage = stage;
        m.error = e.what();
        m.error_kind = e.kind();
    } catch (const std::exception& e) {
        m.ok = false;
        m.failed_stage = stage;
        m.error = e.what();
    }

    m.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        out.write("manifest.json", io::dump(m.to_json()));
    } catch (const Error& e) {
        if (m.ok) {
            m.ok = false;
            m.failed_stage = "manifest";
            m.error = e.what();
            m.error_kind = e.kind();
        }
    }
    return m;
}

}  // namespace slitlab::cli
