#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slitlab/profile.hpp"

namespace slitlab::pattern {

/// A located fringe extremum. Minima are indexed ..., -2, -1, 1, 2, ... and
/// maxima ..., -1, 0, 1, ... counting outward from the central maximum.
struct Extremum {
    int k = 0;
    double x = 0.0;      // m, sub-sample refined
    double value = 0.0;  // refined intensity
};

struct PatternFeatures {
    std::vector<Extremum> minima;  // z_k, sorted by x
    std::vector<Extremum> maxima;  // f_k, sorted by x
    std::optional<double> W;       // z_1 - z_{-1}
    std::optional<double> fringe_period;
    std::map<std::string, double> visibility;  // "f_k" -> local contrast

    const Extremum* minimum(int k) const;
    const Extremum* maximum(int k) const;
};

struct ExtremaOptions {
    // maxima below this fraction of the peak are treated as noise
    double relative_floor = 1e-6;
};

/// Local-comparison search with 3-point parabolic refinement. A fringeless
/// profile yields empty minima and no W.
PatternFeatures find_extrema(const IntensityProfile& profile, const ExtremaOptions& options = {});

/// Closed-form features of the Fraunhofer sinc^2 pattern out to +-orders.
PatternFeatures analytic_features(double slit_width, double wavelength, double distance,
                                  int orders = 4);

/// |W - 2 lambda L / w| / (2 lambda L / w). Throws NotApplicableError without W.
double check_eq2(const PatternFeatures& features, double slit_width, double wavelength,
                 double distance);

/// One-period moving average (the fringeless "dispersion" curve), renormalized.
IntensityProfile envelope(const IntensityProfile& profile, double fringe_period);

/// profile / envelope, clipped to [0, 10] and rescaled to unit mean over the
/// central lobe.
std::vector<double> fringe_mask(const IntensityProfile& profile, const IntensityProfile& env);

/// (I_max - I_min) / (I_max + I_min) over the extrema inside [lo, hi].
double visibility(const IntensityProfile& profile, double lo, double hi);

/// Full width at half maximum around the global peak, linearly interpolated.
std::optional<double> fwhm(const IntensityProfile& profile);

/// Number of local maxima above `fraction` of the global peak.
int count_modes(const IntensityProfile& profile, double fraction = 0.1);

}  // namespace slitlab::pattern
