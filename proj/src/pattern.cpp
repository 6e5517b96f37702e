#include "slitlab/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slitlab/errors.hpp"

namespace slitlab::pattern {

namespace {

enum class Kind { minimum, maximum };

struct Candidate {
    std::size_t i;
    Kind kind;
};

Extremum refine(const IntensityProfile& p, std::size_t i)
{
    const auto& v = p.values;
    const double ym = v[i - 1], y0 = v[i], yp = v[i + 1];
    const double denom = ym - 2.0 * y0 + yp;
    double delta = 0.0;
    if (denom != 0.0)
        delta = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    Extremum e;
    e.x = p.x[i] + delta * p.spacing();
    e.value = std::max(0.0, y0 - 0.25 * (ym - yp) * delta);
    return e;
}

}  // namespace

const Extremum* PatternFeatures::minimum(int k) const
{
    for (const auto& e : minima)
        if (e.k == k)
            return &e;
    return nullptr;
}

const Extremum* PatternFeatures::maximum(int k) const
{
    for (const auto& e : maxima)
        if (e.k == k)
            return &e;
    return nullptr;
}

PatternFeatures find_extrema(const IntensityProfile& profile, const ExtremaOptions& options)
{
    const auto& v = profile.values;
    if (v.size() < 64)
        throw PreconditionError("find_extrema needs at least 64 samples");
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    if (*lo_it == *hi_it)
        throw PreconditionError("find_extrema: profile is constant");
    const double floor = options.relative_floor * *hi_it;

    // Plateaus resolve to their leftmost sample.
    std::vector<std::size_t> peaks;
    std::vector<std::size_t> troughs;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= floor)
            peaks.push_back(i);
        else if (v[i] < v[i - 1] && v[i] <= v[i + 1])
            troughs.push_back(i);
    }

    PatternFeatures out;
    if (peaks.empty())
        return out;

    // Deepest trough between consecutive kept peaks keeps the sequence interleaved.
    std::vector<std::size_t> kept_troughs;
    auto t = troughs.begin();
    for (std::size_t j = 0; j + 1 < peaks.size(); ++j) {
        while (t != troughs.end() && *t < peaks[j])
            ++t;
        std::optional<std::size_t> best;
        for (; t != troughs.end() && *t < peaks[j + 1]; ++t)
            if (!best || v[*t] < v[*best])
                best = *t;
        if (best)
            kept_troughs.push_back(*best);
    }

    std::size_t centre = 0;
    for (std::size_t j = 1; j < peaks.size(); ++j)
        if (std::abs(profile.x[peaks[j]]) < std::abs(profile.x[peaks[centre]]))
            centre = j;

    for (std::size_t j = 0; j < peaks.size(); ++j) {
        Extremum e = refine(profile, peaks[j]);
        e.k = static_cast<int>(j) - static_cast<int>(centre);
        out.maxima.push_back(e);
    }
    const double centre_x = profile.x[peaks[centre]];
    int left = 0;
    for (std::size_t i : kept_troughs)
        if (profile.x[i] < centre_x)
            ++left;
    int idx = 0;
    for (std::size_t i : kept_troughs) {
        Extremum e = refine(profile, i);
        e.k = idx < left ? idx - left : idx - left + 1;
        out.minima.push_back(e);
        ++idx;
    }

    const Extremum* zl = out.minimum(-1);
    const Extremum* zr = out.minimum(1);
    if (zl && zr) {
        out.W = zr->x - zl->x;
        out.fringe_period = *out.W / 2.0;
    }

    for (const auto& f : out.maxima) {
        double sum = 0.0;
        int count = 0;
        for (const auto& z : out.minima) {
            const bool adjacent = (f.k >= 0 && (z.k == f.k || z.k == f.k + 1)) ||
                                  (f.k <= 0 && (z.k == f.k || z.k == f.k - 1));
            if (adjacent && z.k != 0) {
                sum += z.value;
                ++count;
            }
        }
        if (count > 0 && f.value > 0.0) {
            const double floor_v = sum / count;
            out.visibility["f_" + std::to_string(f.k)] = (f.value - floor_v) / (f.value + floor_v);
        }
    }
    return out;
}

PatternFeatures analytic_features(double slit_width, double wavelength, double distance,
                                  int orders)
{
    if (!(slit_width > 0.0 && wavelength > 0.0 && distance > 0.0))
        throw DomainError("analytic_features needs positive geometry");
    if (orders < 1)
        throw PreconditionError("analytic_features needs at least one order");
    const double period = wavelength * distance / slit_width;
    PatternFeatures out;
    out.fringe_period = period;

    // sinc^2 maxima: roots of tan(u) = u just below (k + 1/2) pi.
    std::vector<double> roots;
    for (int k = 1; k <= orders; ++k) {
        double u = (k + 0.5) * std::numbers::pi - 0.1;
        for (int it = 0; it < 50; ++it) {
            const double g = std::tan(u) - u;
            const double dg = 1.0 / (std::cos(u) * std::cos(u)) - 1.0;
            const double step = g / dg;
            u -= step;
            if (std::abs(step) < 1e-15 * u)
                break;
        }
        roots.push_back(u);
    }
    auto sinc2 = [](double u) { return u == 0.0 ? 1.0 : std::pow(std::sin(u) / u, 2); };
    for (int k = -orders; k <= orders; ++k) {
        const double u = k == 0 ? 0.0 : std::copysign(roots[std::abs(k) - 1], k);
        out.maxima.push_back({k, u / std::numbers::pi * period, sinc2(u)});
        if (k != 0)
            out.minima.push_back({k, k * period, 0.0});
    }
    out.W = out.minimum(1)->x - out.minimum(-1)->x;
    for (int k = -orders; k <= orders; ++k)
        out.visibility["f_" + std::to_string(k)] = 1.0;
    return out;
}

double check_eq2(const PatternFeatures& features, double slit_width, double wavelength,
                 double distance)
{
    if (!features.W)
        throw NotApplicableError("pattern has no first-order minima; W is undefined");
    const double predicted = 2.0 * wavelength * distance / slit_width;
    return std::abs(*features.W - predicted) / predicted;
}

IntensityProfile envelope(const IntensityProfile& profile, double fringe_period)
{
    const double dx = profile.spacing();
    const double half = 0.5 * fringe_period / dx;  // half window, in samples
    if (!(fringe_period / dx >= 3.0))
        throw ResolutionError("envelope window spans fewer than 3 samples");

    const auto& v = profile.values;
    const std::size_t n = v.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cum[i] = cum[i - 1] + 0.5 * (v[i - 1] + v[i]) * dx;

    // Integral of the linear interpolant from sample 0 to fractional index s.
    auto integral_to = [&](double s) {
        if (s <= 0.0)
            return 0.0;
        const double last = static_cast<double>(n - 1);
        if (s >= last)
            return cum[n - 1];
        const auto i = static_cast<std::size_t>(s);
        const double u = s - static_cast<double>(i);
        return cum[i] + dx * (v[i] * u + 0.5 * (v[i + 1] - v[i]) * u * u);
    };

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i);
        out[i] = std::max(0.0, (integral_to(s + half) - integral_to(s - half)) / fringe_period);
    }
    IntensityProfile env;
    env.x = profile.x;
    env.values = std::move(out);
    env.normalize();
    return env;
}

std::vector<double> fringe_mask(const IntensityProfile& profile, const IntensityProfile& env)
{
    if (profile.size() != env.size())
        throw PreconditionError("fringe_mask: profile and envelope sizes differ");
    const double p_thr = 1e-9 * profile.peak();
    const double e_thr = 1e-9 * env.peak();
    std::vector<double> mask(profile.size(), 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (profile.values[i] > p_thr && !(env.values[i] > 0.0))
            throw PreconditionError("fringe_mask: envelope vanishes where the profile does not");
        if (env.values[i] > e_thr)
            mask[i] = std::clamp(profile.values[i] / env.values[i], 0.0, 10.0);
    }

    // Central lobe: between z_-1 and z_1, or the half-maximum region of a
    // fringeless profile.
    double lo = 0.0, hi = 0.0;
    const auto features = find_extrema(profile);
    const Extremum* zl = features.minimum(-1);
    const Extremum* zr = features.minimum(1);
    if (zl && zr) {
        lo = zl->x;
        hi = zr->x;
    } else {
        const auto peak_it = std::max_element(profile.values.begin(), profile.values.end());
        const auto ip = static_cast<std::size_t>(peak_it - profile.values.begin());
        const double half = 0.5 * *peak_it;
        std::size_t a = ip, b = ip;
        while (a > 0 && profile.values[a - 1] >= half)
            --a;
        while (b + 1 < profile.size() && profile.values[b + 1] >= half)
            ++b;
        lo = profile.x[a];
        hi = profile.x[b];
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (profile.x[i] >= lo && profile.x[i] <= hi) {
            sum += mask[i];
            ++count;
        }
    }
    if (count == 0 || !(sum > 0.0))
        throw PreconditionError("fringe_mask: central lobe is empty");
    const double scale = static_cast<double>(count) / sum;
    for (double& m : mask)
        m *= scale;
    return mask;
}

double visibility(const IntensityProfile& profile, double lo, double hi)
{
    if (!(hi > lo))
        throw PreconditionError("visibility: empty region");
    const double pad = 0.5 * profile.spacing();
    double vmin = INFINITY, vmax = -INFINITY;
    std::size_t count = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.x[i] >= lo - pad && profile.x[i] <= hi + pad) {
            vmin = std::min(vmin, profile.values[i]);
            vmax = std::max(vmax, profile.values[i]);
            ++count;
        }
    }
    if (count == 0)
        throw NotApplicableError("visibility: region contains no samples");
    if (vmin == vmax)
        return 0.0;

    const auto features = find_extrema(profile);
    // Walk the interleaved sequence and keep extrema inside the region.
    struct Item {
        double x, value;
        bool is_max;
    };
    std::vector<Item> seq;
    for (const auto& e : features.maxima)
        seq.push_back({e.x, e.value, true});
    for (const auto& e : features.minima)
        seq.push_back({e.x, e.value, false});
    std::sort(seq.begin(), seq.end(), [](const Item& a, const Item& b) { return a.x < b.x; });

    double imax = -INFINITY, imin = INFINITY;
    bool paired = false;
    const Item* prev = nullptr;
    for (const auto& item : seq) {
        const bool inside = item.x >= lo - pad && item.x <= hi + pad;
        if (!inside) {
            prev = nullptr;
            continue;
        }
        if (item.is_max)
            imax = std::max(imax, item.value);
        else
            imin = std::min(imin, item.value);
        if (prev && prev->is_max != item.is_max)
            paired = true;
        prev = &item;
    }
    if (!paired)
        throw NotApplicableError("visibility: no adjacent maximum/minimum pair in region");
    return (imax - imin) / (imax + imin);
}

std::optional<double> fwhm(const IntensityProfile& profile)
{
    const auto& v = profile.values;
    if (v.size() < 3)
        return std::nullopt;
    const auto ip = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const double half = 0.5 * v[ip];
    if (!(half > 0.0))
        return std::nullopt;
    std::size_t a = ip;
    while (a > 0 && v[a - 1] >= half)
        --a;
    std::size_t b = ip;
    while (b + 1 < v.size() && v[b + 1] >= half)
        ++b;
    if (a == 0 || b + 1 == v.size())
        return std::nullopt;
    const double dx = profile.spacing();
    const double left = profile.x[a] - dx * (v[a] - half) / (v[a] - v[a - 1]);
    const double right = profile.x[b] + dx * (v[b] - half) / (v[b] - v[b + 1]);
    return right - left;
}

int count_modes(const IntensityProfile& profile, double fraction)
{
    const double thr = fraction * profile.peak();
    const auto features = find_extrema(profile);
    int n = 0;
    for (const auto& e : features.maxima)
        if (e.value >= thr)
            ++n;
    return n;
}

}  // namespace slitlab::pattern
