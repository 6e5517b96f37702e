#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slitlab/pattern.hpp"
#include "slitlab/profile.hpp"
#include "slitlab/quantities.hpp"
#include "slitlab/wavefield.hpp"

namespace slitlab::hypothesis {

/// Experiment geometry shared by both predictive models.
struct Scenario {
    quantities::Species species;
    double wavelength = 0.0;  // m
    double slit_width = 0.0;  // m
    double distance = 0.0;    // m, slit to screen
    wavefield::SourceSpec source;
    std::optional<wavefield::Grid1D> grid;      // slit-plane grid; auto-sized when empty
    std::optional<wavefield::Kernel> kernel;    // exact for fine sources, paraxial for wide
    std::size_t n_samples = 65536;              // used when the grid is auto-sized

    /// Throws DomainError unless wavelength, width and distance are positive.
    void validate() const;
    double fresnel_number() const;
    double momentum() const;       // planck_h / lambda
    double fringe_period() const;  // lambda L / w
    wavefield::Kernel effective_kernel() const;
    wavefield::Grid1D effective_grid() const;
};

/// Electron geometry used throughout the examples: lambda 1 nm, slit 20 um,
/// screen at 1 m, wide beam.
Scenario electron_scenario();

/// The electron geometry with a fine beam of FWHM 0.175 w at x_b = 0. Under
/// the default model its lines are about half a fringe wide, wide enough to
/// split when they land on a fringe zero.
Scenario default_sweep_scenario();

/// Odd linear deflection x_b -> x_p and width rule d = beta |slope| b.
/// The default slope sends x_b = +-w/2 onto the first secondary sinc^2
/// maxima at -+1.4303 lambda L / w.
struct DeflectionModel {
    double gain = 1.0;          // gamma
    double width_factor = 1.0;  // beta
    int sign = -1;              // s
    bool mask_enabled = true;

    /// d x_p / d x_b, including sign and gain
    double slope(const Scenario& s) const;
    double deflection(const Scenario& s, double x_b) const;
    double width(const Scenario& s, double b) const;
    bool operator==(const DeflectionModel&) const = default;
};

/// Dimensionless deflection coefficient 2 u_1 / pi, u_1 the first positive root
/// of tan u = u.
double deflection_coefficient();

enum class ModelId { H0, H1 };
const char* to_string(ModelId id);

struct Prediction {
    IntensityProfile profile;
    pattern::PatternFeatures features;
    ModelId model = ModelId::H0;
    std::optional<double> x_p;            // H1 line center, m
    std::optional<double> d;              // H1 model FWHM, m
    std::optional<double> rendered_fwhm;  // H1 width actually drawn (>= 2 grid spacings)
    std::vector<std::string> warnings;
};

/// Screen grid used for H1 densities: 128 samples per fringe period, zeros
/// of the Fraunhofer pattern on samples.
wavefield::Grid1D screen_grid(const Scenario& s, std::size_t n_samples = 1u << 14);

/// Standard wave propagation: slit field -> propagate -> |psi|^2.
Prediction predict_H0(const Scenario& s);

/// Analytic Fraunhofer pattern of the wide-beam scenario on the screen grid,
/// with closed-form features.
Prediction predict_fraunhofer(const Scenario& s);

/// Deterministic-deflection model: a Gaussian line at x_p of FWHM d,
/// multiplied by the Fraunhofer fringe mask when enabled.
Prediction predict_H1(const Scenario& s, const DeflectionModel& model);

struct SweepStep {
    double x_b = 0.0;
    Prediction prediction;
    int mode_count = 0;
};

/// H1 predictions for x_b uniformly on [0, w/2].
std::vector<SweepStep> sweep_xb(const Scenario& s, const DeflectionModel& model, int steps);

/// (w * dp) / h with dp = p * half_width / L.
double uncertainty_product(const Prediction& prediction, const Scenario& s);

struct OnsetRow {
    double distance = 0.0;
    double fresnel_number = 0.0;
    std::optional<double> visibility;
    bool below_threshold = false;
    std::string error;
};

struct OnsetOptions {
    double threshold = 0.5;
    wavefield::Kernel kernel = wavefield::Kernel::exact;
};

/// Wide-beam H0 at each distance; visibility over [0, lambda L / w + w / 2].
std::vector<OnsetRow> fringe_onset_sweep(const Scenario& s, const std::vector<double>& distances,
                                         const OnsetOptions& options = {});

/// Relative L2 distance between the x_b-averaged H1 density and the wide-beam
/// H0 profile. Reported, never asserted against.
double ensemble_consistency(const Scenario& s, const DeflectionModel& model, int steps);

struct Comparison {
    Prediction h0;
    Prediction h1;
    std::vector<double> x;          // screen coordinates
    std::vector<double> h0_screen;  // H0 resampled onto x, renormalized
    std::vector<double> h1_screen;
    double l2_distance = 0.0;       // relative to H0
    std::optional<double> h0_fwhm;
    std::optional<double> h1_fwhm;
    std::optional<double> h1_uncertainty;
};

Comparison compare_models(const Scenario& s, const DeflectionModel& model);

}  // namespace slitlab::hypothesis
