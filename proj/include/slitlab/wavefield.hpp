#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "slitlab/profile.hpp"

namespace slitlab::wavefield {

using Complex = std::complex<double>;

/// Uniform transverse grid. Sample i sits at center + (i - n/2) * spacing,
/// so the center coordinate is always a sample.
struct Grid1D {
    std::size_t n_samples = 0;
    double spacing = 0.0;
    double center = 0.0;

    /// Validated constructor: n >= 16 and a power of two, spacing > 0.
    static Grid1D make(std::size_t n_samples, double spacing, double center = 0.0);

    double x(std::size_t i) const
    {
        return center + (static_cast<double>(i) - static_cast<double>(n_samples / 2)) * spacing;
    }
    double span() const { return static_cast<double>(n_samples) * spacing; }
    bool operator==(const Grid1D&) const = default;
};

enum class SourceKind { wide, fine };

struct SourceSpec {
    SourceKind kind = SourceKind::wide;
    double fwhm = 0.0;    // m, intensity FWHM (fine only)
    double offset = 0.0;  // m, beam center x_b (fine only)

    static SourceSpec wide() { return {}; }
    static SourceSpec fine(double fwhm, double offset) { return {SourceKind::fine, fwhm, offset}; }
    bool is_fine() const { return kind == SourceKind::fine; }
    bool operator==(const SourceSpec&) const = default;
};

enum class Kernel { paraxial, exact };

const char* to_string(SourceKind kind);
const char* to_string(Kernel kernel);

struct ComplexField {
    Grid1D grid;
    std::vector<Complex> amplitudes;
    double wavelength = 0.0;

    /// sum |a_i|^2 * spacing
    double norm2() const;
    void normalize();
};

struct SlitOptions {
    // b <= width / factor counts as "significantly smaller"
    double smallness_factor = 10.0;
};

struct SlitField {
    ComplexField field;              // normalized
    double transmitted_energy = 0.0; // before normalization
    double incident_energy = 0.0;    // fine sources only; 0 for plane waves
    double narrowest_feature = 0.0;  // min(slit, b)
    std::vector<std::string> warnings;

    double transmitted_fraction() const
    {
        return incident_energy > 0.0 ? transmitted_energy / incident_energy : 1.0;
    }
};

/// Incident field times an ideal top-hat of the given width centered on 0.
/// Edge samples that fall exactly on the slit boundary get half weight.
SlitField make_slit_field(const SourceSpec& source, double slit_width, const Grid1D& grid,
                          double wavelength, const SlitOptions& options = {});

struct Propagated {
    ComplexField field;
    std::vector<std::string> warnings;
};

/// Angular-spectrum propagation over `distance`. `narrowest_feature` (m) feeds
/// the paraxial-validity warning; pass 0 to skip the check.
Propagated propagate(const ComplexField& field, double distance, Kernel kernel,
                     double narrowest_feature = 0.0);

/// |a|^2 normalized to unit integral. Throws EmptyFieldError for a zero field.
IntensityProfile intensity_of(const ComplexField& field);

/// Peak-normalized sinc^2(pi * w * x / (lambda * L)).
double fraunhofer_intensity(double slit_width, double wavelength, double distance, double x);

/// fraunhofer_intensity sampled on a grid and normalized to unit integral.
IntensityProfile fraunhofer_profile(double slit_width, double wavelength, double distance,
                                    const Grid1D& grid);

/// w^2 / (4 lambda L)
double fresnel_number(double slit_width, double wavelength, double distance);

/// Throws GridError when the grid breaks the sizing rule for this geometry:
/// span >= max(8 w, 4 * 2 lambda L / w_min), spacing <= w_min / 16.
void check_grid(const Grid1D& grid, const SourceSpec& source, double slit_width,
                double wavelength, double distance);

/// Picks the finest grid of n samples that satisfies check_grid, keeps the
/// slit edges on samples, and (for plane waves) keeps the propagated
/// spectrum from wrapping around the periodic window.
Grid1D auto_grid(const SourceSpec& source, double slit_width, double wavelength,
                 double distance, std::size_t n_samples = 65536);

}  // namespace slitlab::wavefield
