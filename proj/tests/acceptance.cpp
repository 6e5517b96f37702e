// Acceptance gate: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "golden_table.hpp"
#include "oracles.hpp"
#include "stats.hpp"
#include "slitlab/detector.hpp"
#include "slitlab/hypothesis.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/wavefield.hpp"

using namespace slitlab;
using hypothesis::DeflectionModel;
using hypothesis::Scenario;
namespace fs = std::filesystem;

namespace {

class Criterion {
public:
    explicit Criterion(std::string title) : title_(std::move(title)) {}

    // Records one measured value against its limit.
    void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)))
    {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        lines_.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
        pass_ = pass_ && ok;
    }

    void fail(const std::string& why)
    {
        lines_.push_back("FAIL " + why);
        pass_ = false;
    }

    bool report(int number) const
    {
        std::printf("%s criterion %d: %s\n", pass_ ? "PASS" : "FAIL", number, title_.c_str());
        for (const auto& l : lines_)
            std::printf("       %s\n", l.c_str());
        std::fflush(stdout);
        return pass_;
    }

private:
    std::string title_;
    std::vector<std::string> lines_;
    bool pass_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario electron(double slit_width, double distance)
{
    Scenario s = hypothesis::electron_scenario();
    s.slit_width = slit_width;
    s.distance = distance;
    return s;
}

// Relative L2 between two shapes after normalizing each to unit sum.
double shape_l2(const std::vector<double>& a, const std::vector<double>& b)
{
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::pow(a[i] / sa - b[i] / sb, 2);
        den += std::pow(b[i] / sb, 2);
    }
    return std::sqrt(num / den);
}

double sample_at(const IntensityProfile& p, double x)
{
    return p.values.at(static_cast<std::size_t>(std::lround((x - p.front()) / p.spacing())));
}

// ---------------------------------------------------------------------------

Criterion wide_beam_width()
{
    Criterion c("wide-beam electron pattern: W = 100 um within 5%, n = 2^16 in under 10 s");
    const Scenario s = electron(20e-6, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = hypothesis::predict_H0(s);
    const double elapsed = seconds_since(t0);
    const auto grid = s.effective_grid();
    c.check(grid.n_samples == 65536, "grid samples = %zu (want 65536)", grid.n_samples);
    if (!p.features.W) {
        c.fail("no W found");
        return c;
    }
    const double rel = std::abs(*p.features.W - 100e-6) / 100e-6;
    c.check(rel <= 0.05, "W = %.4f um, relative error %.2e (limit 5e-2)", *p.features.W * 1e6, rel);
    c.check(elapsed < 10.0, "runtime %.3f s (limit 10 s)", elapsed);
    return c;
}

Criterion complementarity()
{
    Criterion c("W times slit width constant within 2% for slit widths 10, 20, 40 um");
    std::vector<double> products;
    for (double w : {10e-6, 20e-6, 40e-6}) {
        const auto p = hypothesis::predict_H0(electron(w, 1.0));
        if (!p.features.W) {
            c.fail("no W for slit " + std::to_string(w));
            return c;
        }
        products.push_back(*p.features.W * w);
        c.check(true, "slit %.0f um: W = %.4f um, W*w = %.6e m^2", w * 1e6, *p.features.W * 1e6, products.back());
    }
    const auto [lo, hi] = std::minmax_element(products.begin(), products.end());
    double mean = 0.0;
    for (double v : products)
        mean += v / static_cast<double>(products.size());
    const double spread = (*hi - *lo) / mean;
    c.check(spread <= 0.02, "spread (max - min) / mean = %.3e (limit 2e-2)", spread);
    return c;
}

Criterion propagator_oracle()
{
    Criterion c("propagator vs direct Fresnel quadrature < 1e-3 at N_F <= 0.1; norm 1e-10; identity 1e-12");
    const double w = 20e-6, lambda = 1e-9;
    struct Case {
        double L;
        std::size_t n;
    };
    // the sample count grows with L so the slit stays equally well resolved
    for (const auto [L, n] : {Case{1.0, 1u << 16}, Case{2.0, 1u << 16}, Case{10.0, 1u << 19}}) {
        const auto grid = wavefield::auto_grid(wavefield::SourceSpec::wide(), w, lambda, L, n);
        const auto slit = wavefield::make_slit_field(wavefield::SourceSpec::wide(), w, grid, lambda);
        const auto p = wavefield::intensity_of(
            wavefield::propagate(slit.field, L, wavefield::Kernel::paraxial, w).field);
        const int panels = 10 * static_cast<int>(std::round(w / grid.spacing));
        const double window = 10.0 * lambda * L / w;
        std::vector<double> sim, ref;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (std::abs(p.x[i]) > window)
                continue;
            sim.push_back(p.values[i]);
            ref.push_back(oracle::fresnel_slit_intensity(p.x[i], w, lambda, L, panels));
        }
        const double err = shape_l2(sim, ref);
        c.check(err < 1e-3, "N_F = %.3f (n = %zu): relative L2 %.3e (limit 1e-3)",
                wavefield::fresnel_number(w, lambda, L), n, err);
    }

    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    wavefield::ComplexField f;
    f.grid = wavefield::Grid1D::make(1u << 16, 1e-7);
    f.wavelength = lambda;
    f.amplitudes.resize(f.grid.n_samples);
    for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
        const double u = (static_cast<double>(i) - 32768.0) / 8192.0;
        f.amplitudes[i] = wavefield::Complex{g(rng), g(rng)} * std::exp(-u * u);
    }
    f.normalize();
    double worst_norm = 0.0;
    for (double L : {1e-4, 1e-2, 1.0, 100.0}) {
        const auto out = wavefield::propagate(f, L, wavefield::Kernel::paraxial).field;
        worst_norm = std::max(worst_norm, std::abs(out.norm2() / f.norm2() - 1.0));
    }
    c.check(worst_norm <= 1e-10, "paraxial norm drift %.3e (limit 1e-10)", worst_norm);

    double worst_identity = 0.0;
    for (auto kernel : {wavefield::Kernel::paraxial, wavefield::Kernel::exact}) {
        const auto out = wavefield::propagate(f, 0.0, kernel).field;
        for (std::size_t i = 0; i < f.amplitudes.size(); ++i)
            worst_identity = std::max(worst_identity, std::abs(out.amplitudes[i] - f.amplitudes[i]));
    }
    c.check(worst_identity <= 1e-12, "zero-distance max deviation %.3e (limit 1e-12)", worst_identity);
    return c;
}

Criterion golden_table()
{
    Criterion c("drop-experiment figures within their tolerances, whole table in under 1 s");
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = golden::drop_experiment_rows();
    const double elapsed = seconds_since(t0);
    for (const auto& r : rows)
        c.check(r.pass(), "%-44s published %-8g computed %-10.4g error %5.1f%% (limit %.0f%%)", r.name.c_str(),
                r.published, r.computed, 100.0 * r.rel_error(), 100.0 * r.tolerance);
    c.check(elapsed < 1.0, "table computed in %.2e s (limit 1 s)", elapsed);
    return c;
}

Criterion monte_carlo()
{
    Criterion c("Monte Carlo: KS and 64-bin chi-square at n = 1e5, bit-identical reruns, prefix property");
    const Scenario s = electron(20e-6, 1.0);
    const auto full = hypothesis::predict_H0(s).profile;
    IntensityProfile p;
    const double half = 8 * s.fringe_period();
    for (std::size_t i = 0; i < full.size(); ++i)
        if (std::abs(full.x[i]) <= half) {
            p.x.push_back(full.x[i]);
            p.values.push_back(full.values[i]);
        }
    p.normalize();

    const std::uint64_t n = 100000, seed = 20240601;
    const auto ev = detector::sample_hits(p, n, seed);
    const double ks = stats::ks_distance(p, ev);
    const double limit = 1.95 / std::sqrt(static_cast<double>(n));
    c.check(ks < limit, "KS distance %.3e (limit %.3e)", ks, limit);

    const auto b = detector::build_up(p, {n}, 64, seed);
    const double pval = stats::chi_square_p(p, b, 0);
    c.check(pval > 0.001, "chi-square p-value %.4f (limit > 0.001)", pval);

    c.check(detector::sample_hits(p, n, seed) == ev, "same seed reproduces all %llu events bit for bit",
            static_cast<unsigned long long>(n));
    const auto shorter = detector::sample_hits(p, n / 10, seed);
    c.check(std::equal(shorter.begin(), shorter.end(), ev.begin()), "first %llu events are a prefix of the %llu run",
            static_cast<unsigned long long>(n / 10), static_cast<unsigned long long>(n));
    return c;
}

Criterion deflection_model()
{
    Criterion c("deflection-model constraints and the 1-2-1 sweep signature");
    const DeflectionModel m;
    const Scenario base = hypothesis::default_sweep_scenario();
    const double period = base.fringe_period();

    Scenario centred = base;
    const auto at_zero = hypothesis::predict_H1(centred, m);
    c.check(*at_zero.x_p == 0.0, "x_p(0) = %g", *at_zero.x_p + 0.0);

    Scenario tiny = base;
    tiny.source.fwhm = hypothesis::screen_grid(base).span() / 1e6;
    const auto narrow = hypothesis::predict_H1(tiny, m);
    c.check(*narrow.d < 1e-3 * period, "b = span/1e6 gives d = %.3e m (%.1e fringe periods)", *narrow.d,
            *narrow.d / period);

    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
        Scenario st = base;
        st.source.offset = 0.5 * base.slit_width * k / 20.0;
        const auto pred = hypothesis::predict_H1(st, m);
        for (int j = 1; j <= 60; ++j)
            for (double z : {j * period, -j * period})
                worst = std::max(worst, sample_at(pred.profile, z) / pred.profile.peak());
    }
    c.check(worst < 1e-6, "masked density at every z_k, worst / peak = %.3e (limit 1e-6)", worst);

    const auto sweep = hypothesis::sweep_xb(base, m, 9);
    std::string counts;
    std::vector<int> runs;
    for (const auto& st : sweep) {
        counts += std::to_string(st.mode_count);
        if (runs.empty() || runs.back() != st.mode_count)
            runs.push_back(st.mode_count);
    }
    c.check(runs == std::vector<int>{1, 2, 1}, "mode counts over x_b in [0, w/2], 9 steps: %s", counts.c_str());

    const double u_wide = hypothesis::uncertainty_product(hypothesis::predict_fraunhofer(base), base);
    c.check(std::abs(u_wide - 1.0) <= 1e-9, "analytic wide-beam uncertainty product - 1 = %.2e (limit 1e-9)",
            u_wide - 1.0);

    Scenario hundredth = base;
    hundredth.source.fwhm = 0.02 * period / std::abs(m.slope(base));
    const auto h1 = hypothesis::predict_H1(hundredth, m);
    const double W = 2.0 * period;
    const double u_h1 = hypothesis::uncertainty_product(h1, hundredth);
    c.check(std::abs(u_h1 - *h1.d / W) <= 1e-6, "H1 with d = W/100: product %.9f vs d/W %.9f (limit 1e-6)", u_h1,
            *h1.d / W);
    return c;
}

Criterion fine_beam_width()
{
    Criterion c("standard propagation of a fine beam: halving b doubles the pattern FWHM within 10%");
    Scenario s = hypothesis::electron_scenario();
    s.slit_width = 40e-9;
    s.distance = 1e-6;
    s.kernel = wavefield::Kernel::exact;
    const double b = 4e-9;
    s.source = wavefield::SourceSpec::fine(b, 0.0);
    const auto wide = pattern::fwhm(hypothesis::predict_H0(s).profile);
    s.source.fwhm = b / 2;
    const auto narrow = pattern::fwhm(hypothesis::predict_H0(s).profile);
    if (!wide || !narrow) {
        c.fail("FWHM not measurable");
        return c;
    }
    const double ratio = *narrow / *wide;
    c.check(std::abs(ratio - 2.0) <= 0.2, "b = 4 nm: FWHM %.2f nm; b = 2 nm: FWHM %.2f nm; ratio %.4f (want 2 +- 10%%)",
            *wide * 1e9, *narrow * 1e9, ratio);
    const double o1 = oracle::gaussian_far_field_fwhm(b, s.wavelength, s.distance);
    const double o2 = oracle::gaussian_far_field_fwhm(b / 2, s.wavelength, s.distance);
    c.check(std::abs(*wide / o1 - 1.0) < 0.03 && std::abs(*narrow / o2 - 1.0) < 0.03,
            "far-field oracle FWHM %.2f nm and %.2f nm (agreement within 3%%)", o1 * 1e9, o2 * 1e9);
    return c;
}

Criterion onset_sweep()
{
    Criterion c("fringe-onset sweep from N_F = 0.01 past N_F = 10 completes with finite rows");
    const Scenario s = hypothesis::electron_scenario();
    std::vector<double> L;
    for (double d = 10.0; d > 2.1e-5; d /= std::sqrt(10.0))
        L.push_back(d);
    L.push_back(s.slit_width);
    const auto rows = hypothesis::fringe_onset_sweep(s, L);
    int errors = 0, non_finite = 0;
    for (const auto& r : rows) {
        if (!r.error.empty())
            ++errors;
        if (!r.visibility || !std::isfinite(*r.visibility) || !std::isfinite(r.fresnel_number))
            ++non_finite;
    }
    c.check(errors == 0, "%zu distances from %g m to %g m (N_F %.3g to %.3g), %d row errors", rows.size(),
            L.front(), L.back(), rows.front().fresnel_number, rows.back().fresnel_number, errors);
    c.check(non_finite == 0, "%d rows with missing or non-finite values", non_finite);
    if (rows.front().visibility)
        c.check(*rows.front().visibility > 0.99, "visibility at N_F = %.3g: %.5f (limit > 0.99)",
                rows.front().fresnel_number, *rows.front().visibility);
    else
        c.fail("no visibility at the far-field end");
    return c;
}

// -- reproducibility through the command-line tool ---------------------------

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& command, const fs::path& config, const fs::path& out, const fs::path& log)
{
    const std::string cmd = "\"" SLITLAB_CLI_PATH "\" " + command + " --config \"" + config.string() +
                            "\" --out \"" + out.string() + "\" > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Criterion reproducibility()
{
    Criterion c("every command re-run with the same config and seed gives identical output digests");
    const std::string geometry = "wavelength = \"1nm\"\nslit_width = \"20um\"\n";
    const std::pair<std::string, std::string> docs[] = {
        {"simulate", "[scenario]\n" + geometry + "distance = \"1m\"\n"},
        {"buildup", "[scenario]\n" + geometry + "distance = \"1m\"\n[sampling]\nn = 100000\nseed = 99\n"
                    "checkpoints = [100, 10000, 100000]\n"},
        {"sweep-xb", "[scenario]\n" + geometry + "distance = \"1m\"\nsource = \"fine\"\nbeam_fwhm = \"3.5um\"\n"},
        {"onset", "[scenario]\n" + geometry + "[sweep]\ndistances = [\"10m\", \"1m\", \"100mm\", \"10mm\"]\n"},
        {"feasibility", "[feasibility]\nspecies = \"Na\"\n"},
        {"compare", "[scenario]\n" + geometry +
                        "distance = \"1m\"\nsource = \"fine\"\nbeam_fwhm = \"3.5um\"\nbeam_offset = \"4um\"\n"},
    };
    const fs::path root = fs::temp_directory_path() / ("slitlab_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    for (const auto& [cmd, body] : docs) {
        const fs::path cfg = root / (cmd + ".toml");
        std::ofstream(cfg, std::ios::binary) << "command = \"" << cmd << "\"\n" << body;
        const fs::path a = root / (cmd + "_a"), b = root / (cmd + "_b");
        const int ca = run_cli(cmd, cfg, a, root / "log.txt");
        const int cb = run_cli(cmd, cfg, b, root / "log.txt");
        if (ca != 0 || cb != 0) {
            c.fail(cmd + ": exit codes " + std::to_string(ca) + ", " + std::to_string(cb) + ": " +
                   slurp(root / "log.txt"));
            continue;
        }
        const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
        const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
        const bool same = ma["outputs"] == mb["outputs"] && ma["config_digest"] == mb["config_digest"];
        c.check(same, "%-11s %zu files, digests %s", cmd.c_str(), ma["outputs"].size(),
                same ? "identical" : "DIFFER");
    }
    fs::remove_all(root);
    return c;
}

}  // namespace

int main()
{
    const std::vector<std::function<Criterion()>> criteria = {
        wide_beam_width, complementarity, propagator_oracle, golden_table, monte_carlo,
        deflection_model, fine_beam_width, onset_sweep, reproducibility,
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        bool ok = false;
        try {
            ok = criteria[i]().report(static_cast<int>(i + 1));
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %zu: threw %s\n", i + 1, e.what());
        }
        if (!ok)
            ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
