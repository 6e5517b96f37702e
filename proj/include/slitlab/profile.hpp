#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slitlab {

/// Screen intensity sampled on a uniform coordinate axis.
struct IntensityProfile {
    std::vector<double> x;       // m, uniform and increasing
    std::vector<double> values;  // >= 0
    bool normalized = false;     // trapezoid integral == 1

    std::size_t size() const { return values.size(); }
    double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
    double front() const { return x.front(); }
    double back() const { return x.back(); }
    double peak() const;
    double trapezoid() const;

    /// Scales values to unit trapezoid integral. Throws EmptyFieldError when the
    /// integral is zero.
    void normalize();

    /// Linear interpolation; zero outside the sampled support.
    double at(double xq) const;
};

/// Builds a profile from a uniform axis description.
IntensityProfile make_profile(double x0, double dx, std::vector<double> values,
                              bool normalize_now);

/// Relative L2 distance ||a - b|| / ||b|| over paired samples.
double relative_l2(std::span<const double> a, std::span<const double> b);

}  // namespace slitlab
