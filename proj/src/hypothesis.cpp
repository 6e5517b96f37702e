#include "slitlab/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "slitlab/errors.hpp"

namespace slitlab::hypothesis {

using wavefield::Grid1D;
using wavefield::Kernel;

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

void append(std::vector<std::string>& into, const std::vector<std::string>& from)
{
    into.insert(into.end(), from.begin(), from.end());
}

}  // namespace

void Scenario::validate() const
{
    if (!(wavelength > 0.0))
        throw DomainError("scenario wavelength must be positive");
    if (!(slit_width > 0.0))
        throw DomainError("scenario slit width must be positive");
    if (!(distance > 0.0))
        throw DomainError("scenario distance must be positive");
    if (source.is_fine() && !(source.fwhm > 0.0))
        throw DomainError("fine source needs a positive FWHM");
}

double Scenario::fresnel_number() const
{
    return wavefield::fresnel_number(slit_width, wavelength, distance);
}

double Scenario::momentum() const
{
    return quantities::constants().planck_h / wavelength;
}

double Scenario::fringe_period() const
{
    return wavelength * distance / slit_width;
}

Kernel Scenario::effective_kernel() const
{
    if (kernel)
        return *kernel;
    return source.is_fine() ? Kernel::exact : Kernel::paraxial;
}

Grid1D Scenario::effective_grid() const
{
    if (grid)
        return *grid;
    return wavefield::auto_grid(source, slit_width, wavelength, distance, n_samples);
}

Scenario electron_scenario()
{
    Scenario s;
    s.species = quantities::species_lookup("electron");
    s.wavelength = 1e-9;
    s.slit_width = 20e-6;
    s.distance = 1.0;
    return s;
}

Scenario default_sweep_scenario()
{
    Scenario s = electron_scenario();
    s.source = wavefield::SourceSpec::fine(0.175 * s.slit_width, 0.0);
    return s;
}

double deflection_coefficient()
{
    static const double coefficient = [] {
        double u = 1.5 * std::numbers::pi - 0.1;
        for (int i = 0; i < 60; ++i) {
            const double c = std::cos(u);
            u -= (std::tan(u) - u) / (1.0 / (c * c) - 1.0);
        }
        return 2.0 * u / std::numbers::pi;
    }();
    return coefficient;
}

double DeflectionModel::slope(const Scenario& s) const
{
    return static_cast<double>(sign) * gain * deflection_coefficient() * s.wavelength *
           s.distance / (s.slit_width * s.slit_width);
}

double DeflectionModel::deflection(const Scenario& s, double x_b) const
{
    return slope(s) * x_b;
}

double DeflectionModel::width(const Scenario& s, double b) const
{
    return width_factor * std::abs(slope(s)) * b;
}

const char* to_string(ModelId id)
{
    return id == ModelId::H0 ? "H0" : "H1";
}

Grid1D screen_grid(const Scenario& s, std::size_t n_samples)
{
    s.validate();
    return Grid1D::make(n_samples, s.fringe_period() / 128.0, 0.0);
}

Prediction predict_H0(const Scenario& s)
{
    s.validate();
    const Grid1D grid = s.effective_grid();
    wavefield::check_grid(grid, s.source, s.slit_width, s.wavelength, s.distance);

    Prediction out;
    out.model = ModelId::H0;
    auto slit = wavefield::make_slit_field(s.source, s.slit_width, grid, s.wavelength);
    append(out.warnings, slit.warnings);
    auto screen = wavefield::propagate(slit.field, s.distance, s.effective_kernel(),
                                       slit.narrowest_feature);
    append(out.warnings, screen.warnings);
    out.profile = wavefield::intensity_of(screen.field);
    out.features = pattern::find_extrema(out.profile);
    if (!s.source.is_fine())
        out.features.fringe_period = s.fringe_period();
    return out;
}

Prediction predict_fraunhofer(const Scenario& s)
{
    const Grid1D grid = screen_grid(s);
    Prediction out;
    out.model = ModelId::H0;
    out.profile = wavefield::fraunhofer_profile(s.slit_width, s.wavelength, s.distance, grid);
    out.features = pattern::analytic_features(s.slit_width, s.wavelength, s.distance);
    return out;
}

Prediction predict_H1(const Scenario& s, const DeflectionModel& model)
{
    s.validate();
    if (!s.source.is_fine())
        throw NotApplicableError("H1 deflection model needs a fine source");
    if (model.sign != 1 && model.sign != -1)
        throw DomainError("deflection sign must be +1 or -1");
    if (!(model.gain != 0.0) || !std::isfinite(model.gain))
        throw DomainError("deflection gain must be finite and non-zero");
    if (!(model.width_factor >= 0.0))
        throw DomainError("width factor must be non-negative");

    const double x_b = s.source.offset;
    const double b = s.source.fwhm;
    if (std::abs(x_b) > 0.5 * s.slit_width + 3.0 * b)
        throw EmptyFieldError("fine source at x_b = " + fmt(x_b) + " m misses the slit");

    Prediction out;
    out.model = ModelId::H1;
    out.x_p = model.deflection(s, x_b);
    out.d = model.width(s, b);
    const double period = s.fringe_period();
    if (*out.d >= period)
        throw ModelBoundError("line width d = " + fmt(*out.d) +
                              " m is not narrower than the fringe period " + fmt(period) + " m");

    const Grid1D grid = screen_grid(s);
    const double floor_width = 2.0 * grid.spacing;
    double width = *out.d;
    if (width < floor_width) {
        width = floor_width;
        out.warnings.push_back("line width " + fmt(*out.d) + " m clamped to " +
                               fmt(floor_width) + " m (2 screen samples)");
    }
    out.rendered_fwhm = width;
    if (std::abs(*out.x_p) + 4.0 * width > 0.45 * grid.span())
        throw GridError("deflected line at " + fmt(*out.x_p) + " m leaves the screen window");

    std::vector<double> mask;
    if (model.mask_enabled) {
        const auto curve_a =
            wavefield::fraunhofer_profile(s.slit_width, s.wavelength, s.distance, grid);
        mask = pattern::fringe_mask(curve_a, pattern::envelope(curve_a, period));
    }

    const double k = 4.0 * std::numbers::ln2 / (width * width);
    std::vector<double> values(grid.n_samples);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dx = grid.x(i) - *out.x_p;
        values[i] = std::exp(-k * dx * dx);
        if (model.mask_enabled)
            values[i] *= mask[i];
    }
    out.profile = make_profile(grid.x(0), grid.spacing, std::move(values), true);
    out.features = pattern::find_extrema(out.profile);
    out.features.fringe_period = period;
    return out;
}

std::vector<SweepStep> sweep_xb(const Scenario& s, const DeflectionModel& model, int steps)
{
    if (steps < 3)
        throw PreconditionError("sweep_xb needs at least 3 steps");
    std::vector<std::future<SweepStep>> jobs;
    jobs.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double x_b = 0.5 * s.slit_width * k / (steps - 1);
        jobs.push_back(std::async(std::launch::async, [&s, &model, x_b] {
            Scenario step = s;
            step.source.offset = x_b;
            SweepStep r;
            r.x_b = x_b;
            r.prediction = predict_H1(step, model);
            r.mode_count = pattern::count_modes(r.prediction.profile, 0.1);
            return r;
        }));
    }
    std::vector<SweepStep> out;
    out.reserve(jobs.size());
    for (auto& j : jobs)
        out.push_back(j.get());
    return out;
}

double uncertainty_product(const Prediction& prediction, const Scenario& s)
{
    s.validate();
    double half_width = 0.0;
    if (prediction.model == ModelId::H1 && prediction.d) {
        half_width = 0.5 * *prediction.d;
    } else if (prediction.model == ModelId::H0 && prediction.features.W) {
        half_width = 0.5 * *prediction.features.W;
    } else {
        throw NotApplicableError("prediction has no measurable width");
    }
    const double h = quantities::constants().planck_h;
    const double p = h / s.wavelength;
    const double dp = p * half_width / s.distance;
    return s.slit_width * dp / h;
}

std::vector<OnsetRow> fringe_onset_sweep(const Scenario& s, const std::vector<double>& distances,
                                         const OnsetOptions& options)
{
    if (distances.size() < 2)
        throw PreconditionError("onset sweep needs at least two distances");
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] > 0.0))
            throw PreconditionError("onset sweep distances must be positive");
        if (i > 0 && !(distances[i] < distances[i - 1]))
            throw PreconditionError("onset sweep distances must be strictly decreasing");
    }
    const double nf_first = wavefield::fresnel_number(s.slit_width, s.wavelength, distances.front());
    const double nf_last = wavefield::fresnel_number(s.slit_width, s.wavelength, distances.back());
    // relative slack so that round-number geometries hitting 0.01 or 10 exactly are accepted
    if (!(nf_first <= 0.01 * (1.0 + 1e-9) && nf_last >= 10.0 * (1.0 - 1e-9)))
        throw PreconditionError("onset sweep must span Fresnel numbers from <= 0.01 to >= 10");

    std::vector<OnsetRow> rows;
    for (double L : distances) {
        OnsetRow row;
        row.distance = L;
        row.fresnel_number = wavefield::fresnel_number(s.slit_width, s.wavelength, L);
        try {
            Scenario step = s;
            step.distance = L;
            step.source = wavefield::SourceSpec::wide();
            step.kernel = options.kernel;
            step.grid.reset();
            const auto pred = predict_H0(step);
            const double hi = s.wavelength * L / s.slit_width + 0.5 * s.slit_width;
            const double v = pattern::visibility(pred.profile, 0.0, hi);
            if (!std::isfinite(v))
                throw DomainError("non-finite visibility");
            row.visibility = v;
            row.below_threshold = v < options.threshold;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::vector<double> resample(const IntensityProfile& p, const Grid1D& grid)
{
    std::vector<double> out(grid.n_samples);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = p.at(grid.x(i));
    return out;
}

Prediction wide_reference(const Scenario& s)
{
    Scenario wide = s;
    wide.source = wavefield::SourceSpec::wide();
    wide.kernel.reset();
    wide.grid.reset();
    return predict_H0(wide);
}

}  // namespace

double ensemble_consistency(const Scenario& s, const DeflectionModel& model, int steps)
{
    if (steps < 16)
        throw PreconditionError("ensemble_consistency needs at least 16 steps");
    const Grid1D grid = screen_grid(s);
    std::vector<double> mixture(grid.n_samples, 0.0);
    for (int j = 0; j < steps; ++j) {
        Scenario step = s;
        step.source.offset = -0.5 * s.slit_width + s.slit_width * j / (steps - 1);
        const auto pred = predict_H1(step, model);
        for (std::size_t i = 0; i < mixture.size(); ++i)
            mixture[i] += pred.profile.values[i];
    }
    auto mix = make_profile(grid.x(0), grid.spacing, std::move(mixture), true);
    auto ref = make_profile(grid.x(0), grid.spacing, resample(wide_reference(s).profile, grid), true);
    return relative_l2(mix.values, ref.values);
}

Comparison compare_models(const Scenario& s, const DeflectionModel& model)
{
    Comparison c;
    c.h0 = predict_H0(s);
    c.h1 = predict_H1(s, model);
    const Grid1D grid = screen_grid(s);
    c.x.resize(grid.n_samples);
    for (std::size_t i = 0; i < c.x.size(); ++i)
        c.x[i] = grid.x(i);
    auto h0 = make_profile(grid.x(0), grid.spacing, resample(c.h0.profile, grid), true);
    c.h0_screen = h0.values;
    c.h1_screen = c.h1.profile.values;
    c.l2_distance = relative_l2(c.h1_screen, c.h0_screen);
    c.h0_fwhm = pattern::fwhm(c.h0.profile);
    c.h1_fwhm = pattern::fwhm(c.h1.profile);
    c.h1_uncertainty = uncertainty_product(c.h1, s);
    return c;
}

}  // namespace slitlab::hypothesis
