#include "slitlab/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "slitlab/errors.hpp"

namespace slitlab::detector {

namespace {

std::uint64_t mix64(std::uint64_t z)
{
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class InverseCdf {
public:
    explicit InverseCdf(const IntensityProfile& p) : p_(p), cum_(p.size(), 0.0)
    {
        const double dx = p.spacing();
        for (std::size_t i = 1; i < p.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (p.values[i - 1] + p.values[i]) * dx;
    }

    double operator()(double u) const
    {
        const double target = u * cum_.back();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        std::size_t i = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
        i = std::min(i, cum_.size() - 2);
        // Skip zero-mass cells so events never land where the density is zero.
        while (i + 2 < cum_.size() && cum_[i + 1] == cum_[i])
            ++i;
        const double dx = p_.spacing();
        const double r = (target - cum_[i]) / dx;
        const double a = p_.values[i];
        const double slope = p_.values[i + 1] - a;
        // Solve a t + slope t^2 / 2 = r on [0, 1].
        double t;
        if (std::abs(slope) < 1e-12 * std::max(a, 1e-300)) {
            t = a > 0.0 ? r / a : 0.0;
        } else {
            const double disc = std::max(0.0, a * a + 2.0 * slope * r);
            t = 2.0 * r / (a + std::sqrt(disc));
        }
        t = std::clamp(t, 0.0, 1.0);
        return p_.x[i] + t * dx;
    }

private:
    const IntensityProfile& p_;
    std::vector<double> cum_;
};

void check_profile(const IntensityProfile& profile)
{
    if (profile.size() < 2)
        throw PreconditionError("sample_hits: profile needs at least two samples");
    const double total = profile.trapezoid();
    if (!profile.normalized || std::abs(total - 1.0) > 1e-6)
        throw PreconditionError("sample_hits: profile is not normalized");
    for (double v : profile.values)
        if (!(v >= 0.0))
            throw PreconditionError("sample_hits: profile has negative or NaN values");
}

}  // namespace

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t stream)
{
    std::uint64_t h = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (stream * 0xd1b54a32d192ed03ULL));
    h = mix64(h + index * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<DetectionEvent> sample_hits(const IntensityProfile& profile, std::uint64_t n,
                                        std::uint64_t seed, const SamplerOptions& options)
{
    check_profile(profile);
    std::vector<DetectionEvent> events(n);
    if (n == 0)
        return events;

    const InverseCdf inverse(profile);
    const double lo = profile.front(), hi = profile.back();
    auto fill = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            double x = inverse(uniform01(seed, i, 0));
            if (options.blur_sigma > 0.0) {
                // Box-Muller from two further independent streams.
                const double u1 = 1.0 - uniform01(seed, i, 1);
                const double u2 = uniform01(seed, i, 2);
                const double g = std::sqrt(-2.0 * std::log(u1)) *
                                 std::cos(2.0 * std::numbers::pi * u2);
                x = std::clamp(x + options.blur_sigma * g, lo, hi);
            }
            events[i] = {x, i};
        }
    };

    unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
    workers = std::max(1u, workers);
    const std::uint64_t min_chunk = 1u << 14;
    if (workers == 1 || n < 2 * min_chunk) {
        fill(0, n);
        return events;
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n / min_chunk));
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = w * chunk, e = std::min(n, b + chunk);
        if (b < e)
            pool.emplace_back(fill, b, e);
    }
    return events;
}

BuildUp build_up(const IntensityProfile& profile, const std::vector<std::uint64_t>& checkpoints,
                 std::size_t bins, std::uint64_t seed, const SamplerOptions& options)
{
    if (checkpoints.empty())
        throw PreconditionError("build_up: no checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw PreconditionError("build_up: checkpoints must be strictly increasing");
    if (bins < 8)
        throw PreconditionError("build_up: need at least 8 bins");

    BuildUp out;
    out.seed = seed;
    out.checkpoints = checkpoints;
    const double lo = profile.front(), hi = profile.back();
    out.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        out.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);

    const auto events = sample_hits(profile, checkpoints.back(), seed, options);
    std::vector<std::uint64_t> counts(bins, 0);
    std::size_t next = 0;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::uint64_t i = 0; i <= events.size(); ++i) {
        while (next < checkpoints.size() && checkpoints[next] == i) {
            out.histograms.push_back(counts);
            ++next;
        }
        if (i == events.size())
            break;
        auto b = static_cast<std::size_t>((events[i].x - lo) / width);
        counts[std::min(b, bins - 1)] += 1;
    }
    return out;
}

}  // namespace slitlab::detector
