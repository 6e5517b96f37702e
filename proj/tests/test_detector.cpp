#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stats.hpp"
#include "slitlab/detector.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/hypothesis.hpp"

using namespace slitlab;
using namespace slitlab::detector;

namespace {

// Electron-case screen density restricted to +-8 fringe periods.
const IntensityProfile& electron_profile()
{
    static const IntensityProfile p = [] {
        hypothesis::Scenario s;
        s.species = quantities::species_lookup("electron");
        s.wavelength = 1e-9;
        s.slit_width = 20e-6;
        s.distance = 1.0;
        const auto full = hypothesis::predict_H0(s).profile;
        const double half = 8 * s.fringe_period();
        IntensityProfile out;
        for (std::size_t i = 0; i < full.size(); ++i)
            if (std::abs(full.x[i]) <= half) {
                out.x.push_back(full.x[i]);
                out.values.push_back(full.values[i]);
            }
        out.normalize();
        return out;
    }();
    return p;
}

IntensityProfile triangle()
{
    std::vector<double> v(101);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = 50.0 - std::abs(static_cast<double>(i) - 50.0);
    return make_profile(-1.0, 0.02, std::move(v), true);
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("zero events")
{
    CHECK(sample_hits(triangle(), 0, 1).empty());
}

TEST_CASE("events stay inside the support")
{
    const auto p = triangle();
    for (const auto& e : sample_hits(p, 20000, 3)) {
        CHECK(e.x >= p.front());
        CHECK(e.x <= p.back());
    }
    SamplerOptions blur;
    blur.blur_sigma = 0.3;
    for (const auto& e : sample_hits(p, 20000, 3, blur)) {
        CHECK(e.x >= p.front());
        CHECK(e.x <= p.back());
    }
}

TEST_CASE("unnormalized profile is rejected")
{
    auto p = triangle();
    for (double& v : p.values)
        v *= 2.0;
    CHECK_THROWS_AS(sample_hits(p, 10, 1), PreconditionError);
    const auto raw = make_profile(0.0, 1.0, std::vector<double>(10, 1.0), false);
    CHECK_THROWS_AS(sample_hits(raw, 10, 1), PreconditionError);
}

TEST_CASE("events avoid zero-density cells")
{
    std::vector<double> v(200, 1.0);
    for (std::size_t i = 80; i < 120; ++i)
        v[i] = 0.0;
    const auto p = make_profile(0.0, 1.0, v, true);
    for (const auto& e : sample_hits(p, 50000, 9))
        CHECK_FALSE((e.x > 80.0 && e.x < 119.0));
}

TEST_CASE("KS distance on the electron profile")
{
    const auto& p = electron_profile();
    const std::uint64_t n = 100000;
    const auto ev = sample_hits(p, n, 12345);
    CHECK(stats::ks_distance(p, ev) < 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("64-bin chi-square on the electron profile")
{
    const auto& p = electron_profile();
    const auto b = build_up(p, {100000}, 64, 2024);
    CHECK(stats::chi_square_p(p, b, 0) > 0.001);
}

TEST_CASE("property: KS bound holds for random seeds and shapes")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int failures = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        // random positive piecewise density
        std::vector<double> v(64);
        for (double& x : v)
            x = u(rng) < 0.2 ? 0.0 : u(rng);
        v[10] = 1.0;
        const auto p = make_profile(0.0, 1e-6, v, true);
        const std::uint64_t n = 20000;
        if (stats::ks_distance(p, sample_hits(p, n, rng())) >= 1.95 / std::sqrt(static_cast<double>(n)))
            ++failures;
    }
    // at significance 0.001, 20 trials almost never produce a single rejection
    CHECK(failures == 0);
}

TEST_CASE("same seed gives bit-identical events")
{
    const auto& p = electron_profile();
    CHECK(sample_hits(p, 50000, 77) == sample_hits(p, 50000, 77));
    CHECK_FALSE(sample_hits(p, 1000, 77) == sample_hits(p, 1000, 78));
}

TEST_CASE("property: results do not depend on worker count")
{
    const auto& p = electron_profile();
    SamplerOptions one;
    one.workers = 1;
    const auto ref = sample_hits(p, 100000, 5, one);
    for (unsigned w : {2u, 3u, 4u, 7u}) {
        SamplerOptions o;
        o.workers = w;
        CAPTURE(w);
        CHECK(sample_hits(p, 100000, 5, o) == ref);
    }
    SamplerOptions blur_one, blur_many;
    blur_one.workers = 1;
    blur_many.workers = 5;
    blur_one.blur_sigma = blur_many.blur_sigma = 2e-6;
    CHECK(sample_hits(p, 70000, 5, blur_one) == sample_hits(p, 70000, 5, blur_many));
}

TEST_CASE("property: prefix")
{
    std::mt19937_64 rng(17);
    const auto& p = electron_profile();
    for (int t = 0; t < 10; ++t) {
        const std::uint64_t m = 1000 + rng() % 60000;
        const std::uint64_t n = rng() % m;
        const std::uint64_t seed = rng();
        const auto big = sample_hits(p, m, seed);
        const auto small = sample_hits(p, n, seed);
        CHECK(std::equal(small.begin(), small.end(), big.begin()));
    }
}

TEST_CASE("sample mean converges to the profile mean")
{
    const auto p = triangle();
    // profile moments by quadrature of the linear interpolant
    auto density = [&](double x) { return p.at(x); };
    const double mean = oracle::simpson([&](double x) { return x * density(x); }, p.front(), p.back(), 10000);
    const double m2 = oracle::simpson([&](double x) { return x * x * density(x); }, p.front(), p.back(), 10000);
    const double sigma = std::sqrt(m2 - mean * mean);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto ev = sample_hits(p, 100000, seed);
        double s = 0.0;
        for (const auto& e : ev)
            s += e.x;
        CHECK(std::abs(s / 1e5 - mean) < 4 * sigma / std::sqrt(1e5));
    }
}

TEST_CASE("build-up histograms")
{
    const auto& p = electron_profile();
    const auto b = build_up(p, {10, 100, 3000}, 32, 4);
    REQUIRE(b.histograms.size() == 3);
    const std::uint64_t expect[] = {10, 100, 3000};
    for (std::size_t c = 0; c < 3; ++c) {
        std::uint64_t sum = 0;
        for (auto v : b.histograms[c])
            sum += v;
        CHECK(sum == expect[c]);
    }
    for (std::size_t c = 1; c < 3; ++c)
        for (std::size_t i = 0; i < 32; ++i)
            CHECK(b.histograms[c][i] >= b.histograms[c - 1][i]);
    CHECK(b.bin_edges.size() == 33);
    CHECK(build_up(p, {10, 100, 3000}, 32, 4) == b);
}

TEST_CASE("build-up preconditions")
{
    const auto p = triangle();
    CHECK_THROWS_AS(build_up(p, {100, 100}, 16, 1), PreconditionError);
    CHECK_THROWS_AS(build_up(p, {100, 10}, 16, 1), PreconditionError);
    CHECK_THROWS_AS(build_up(p, {}, 16, 1), PreconditionError);
    CHECK_THROWS_AS(build_up(p, {10}, 7, 1), PreconditionError);
}

TEST_CASE("uniform stream")
{
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = uniform01(42, i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(uniform01(42, 7, 0) != uniform01(42, 7, 1));
    CHECK(uniform01(42, 7) == uniform01(42, 7));
}

}
