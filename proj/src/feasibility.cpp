#include "slitlab/feasibility.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "slitlab/errors.hpp"

namespace slitlab::feasibility {

using quantities::constants;

namespace {

void require_mass(const Species& s)
{
    if (s.massless())
        throw DomainError("species '" + s.name + "' is massless");
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(what) + " must be positive and finite");
}

}  // namespace

FreeFall free_fall(double drop_height, const Species& species, const PhysicalConstants& k)
{
    if (!(drop_height >= 0.0))
        throw DomainError("drop height must be non-negative");
    require_mass(species);
    FreeFall f;
    f.t = std::sqrt(2.0 * drop_height / k.grav_g);
    f.v = k.grav_g * f.t;
    f.E_k = species.mass * k.grav_g * drop_height / k.electronvolt;
    return f;
}

double drop_height_for_energy(double E_k, const Species& species, const PhysicalConstants& k)
{
    require_positive(E_k, "kinetic energy");
    require_mass(species);
    return E_k * k.electronvolt / (species.mass * k.grav_g);
}

DeBroglie de_broglie(double E_k, const Species& species)
{
    if (!(E_k > 0.0))
        throw DomainError("de Broglie wavelength needs a positive kinetic energy");
    require_mass(species);
    const auto& k = constants();
    const double E0 = quantities::rest_energy_of(species);
    const double hc_ev_m = k.planck_h * k.light_c / k.electronvolt;
    DeBroglie out;
    out.wavelength = hc_ev_m / std::sqrt(2.0 * E_k * E0);
    out.wavelength_nonrelativistic =
        k.planck_h / std::sqrt(2.0 * species.mass * E_k * k.electronvolt);
    if (E_k / E0 >= 1e-3) {
        std::ostringstream os;
        os << "E_k/E_0 = " << E_k / E0 << " is not << 1; the low-energy formula is inaccurate";
        out.warnings.push_back(os.str());
    }
    return out;
}

ZeroPoint zero_point(double freq, const Species& species)
{
    require_positive(freq, "trap frequency");
    require_mass(species);
    const auto& k = constants();
    ZeroPoint z;
    const double E_joule = 0.5 * k.planck_h * freq;
    z.E = E_joule / k.electronvolt;
    z.p = std::sqrt(2.0 * species.mass * E_joule);
    z.wavelength = k.planck_h / z.p;
    return z;
}

double ground_state_fwhm(double freq, const Species& species)
{
    require_positive(freq, "trap frequency");
    require_mass(species);
    const double alpha = species.mass * 2.0 * std::numbers::pi * freq / constants().hbar;
    return 2.0 * std::sqrt(2.0 * std::numbers::ln2 / alpha);
}

MomentumBudget momentum_budget(double slit_width, double margin_factor)
{
    require_positive(slit_width, "slit width");
    if (!(margin_factor >= 1.0))
        throw DomainError("margin factor must be >= 1");
    MomentumBudget b;
    b.p_limit = constants().planck_h / slit_width;
    b.p_threshold = b.p_limit / margin_factor;
    return b;
}

EnergyEquivalents energy_equivalents(double p, const Species& species)
{
    if (!(p >= 0.0))
        throw DomainError("momentum must be non-negative");
    require_mass(species);
    const auto& k = constants();
    EnergyEquivalents e;
    e.E = p * p / (2.0 * species.mass);
    e.T = 2.0 * e.E / k.boltzmann_kB;
    e.nu = 2.0 * e.E / k.planck_h;
    return e;
}

double momentum_from_energy(double E_joule, const Species& species)
{
    if (!(E_joule >= 0.0))
        throw DomainError("energy must be non-negative");
    require_mass(species);
    return std::sqrt(2.0 * species.mass * E_joule);
}

double energy_from_temperature(double T)
{
    if (!(T >= 0.0))
        throw DomainError("temperature must be non-negative");
    return 0.5 * constants().boltzmann_kB * T;
}

double energy_from_frequency(double nu)
{
    if (!(nu >= 0.0))
        throw DomainError("frequency must be non-negative");
    return 0.5 * constants().planck_h * nu;
}

LensShift lens_shift_budget(double offset, double fall_time, const Species& species)
{
    require_positive(fall_time, "fall time");
    require_mass(species);
    LensShift l;
    l.v_x = offset / fall_time;
    l.p_x = species.mass * l.v_x;
    return l;
}

double knockout_selection(double window, double v_max)
{
    require_positive(window, "selection window");
    require_positive(v_max, "maximum velocity");
    return window / v_max;
}

double drift(double v, double t)
{
    return v * t;
}

void DropScenario::validate() const
{
    require_mass(species);
    require_positive(drop_height, "drop height");
    require_positive(slit_width, "slit width");
    require_positive(radial_freq, "radial frequency");
    require_positive(axial_freq, "axial frequency");
    require_positive(beam_window, "beam window");
    require_positive(lens_offset_max, "lens offset");
    require_positive(beam_width, "beam width");
    require_positive(wavelength_factor, "wavelength factor");
    require_positive(drift_budget, "drift budget");
    require_positive(gravity, "gravity");
    if (!(margin_factor >= 1.0))
        throw DomainError("margin factor must be >= 1");
    if (knockout_vmax)
        require_positive(*knockout_vmax, "knockout velocity");
}

bool FeasibilityReport::all_pass() const
{
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

FeasibilityReport evaluate_scenario(const DropScenario& s)
{
    s.validate();
    const auto k = constants().with_gravity(s.gravity);
    const Species& sp = s.species;

    FeasibilityReport r;
    r.species = sp.name;
    const auto fall = free_fall(s.drop_height, sp, k);
    r.t_fall = fall.t;
    r.v_impact = fall.v;
    r.E_k = fall.E_k;
    const auto db = de_broglie(fall.E_k, sp);
    r.lambda_dB = db.wavelength;
    r.lambda_dB_nonrel = db.wavelength_nonrelativistic;
    r.warnings = db.warnings;
    r.radial = zero_point(s.radial_freq, sp);
    r.axial = zero_point(s.axial_freq, sp);
    r.fwhm_ground = ground_state_fwhm(s.radial_freq, sp);

    const auto budget = momentum_budget(s.slit_width, s.margin_factor);
    r.p_limit = budget.p_limit;
    r.p_threshold = budget.p_threshold;
    r.critical_energy = energy_equivalents(budget.p_threshold, sp).E;
    r.radial_energy_ratio = r.radial.E * k.electronvolt / r.critical_energy;

    r.knockout_vmax = s.knockout_vmax ? *s.knockout_vmax : s.drift_budget / r.t_fall;
    r.knockout_duration = knockout_selection(s.beam_window, r.knockout_vmax);
    r.knockout_drift = drift(r.knockout_vmax, r.t_fall);
    r.knockout_p = sp.mass * r.knockout_vmax;
    r.lens = lens_shift_budget(s.lens_offset_max, r.t_fall, sp);

    auto add = [&r](std::string name, std::string quantity, double value, std::string cmp,
                    double threshold, std::string unit) {
        const bool pass = cmp == "<=" ? value <= threshold : value >= threshold;
        r.checks.push_back({std::move(name), std::move(quantity), value, std::move(cmp),
                            threshold, std::move(unit), pass});
    };
    add("zero_point_momentum", "p_zero(radial)", r.radial.p, "<=", r.p_threshold, "N·s");
    add("wavelength_vs_beam", "lambda_dB", r.lambda_dB, ">=",
        s.wavelength_factor * s.beam_width, "m");
    add("knockout_drift", "v_max * t_fall", r.knockout_drift, "<=", s.drift_budget, "m");
    add("knockout_momentum", "m * v_max", r.knockout_p, "<=", r.p_threshold, "N·s");
    add("lens_momentum", "m * offset / t_fall", r.lens.p_x, "<=", r.p_limit, "N·s");
    return r;
}

std::string format_si(double value, const std::string& unit)
{
    char buf[64];
    if (unit == "N·s" || unit == "J" || value == 0.0 || !std::isfinite(value)) {
        std::snprintf(buf, sizeof buf, "%.4g %s", value, unit.c_str());
        return buf;
    }
    static const struct {
        double scale;
        const char* prefix;
    } prefixes[] = {{1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""},  {1e-3, "m"},
                    {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}, {1e-15, "f"}};
    const double mag = std::abs(value);
    for (const auto& p : prefixes) {
        if (mag >= p.scale * (1.0 - 1e-12)) {
            std::snprintf(buf, sizeof buf, "%.4g %s%s", value / p.scale, p.prefix, unit.c_str());
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "%.4g %s", value, unit.c_str());
    return buf;
}

std::string format_report(const FeasibilityReport& r)
{
    std::ostringstream os;
    auto row = [&os](const char* label, const std::string& value) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-34s %s\n", label, value.c_str());
        os << buf;
    };
    os << "Feasibility report: " << r.species << "\n";
    row("fall time", format_si(r.t_fall, "s"));
    row("impact velocity", format_si(r.v_impact, "m/s"));
    row("kinetic energy", format_si(r.E_k, "eV"));
    row("de Broglie wavelength", format_si(r.lambda_dB, "m"));
    row("zero-point energy (radial)", format_si(r.radial.E, "eV"));
    row("zero-point wavelength (radial)", format_si(r.radial.wavelength, "m"));
    row("zero-point momentum (radial)", format_si(r.radial.p, "N·s"));
    row("zero-point energy (axial)", format_si(r.axial.E, "eV"));
    row("zero-point wavelength (axial)", format_si(r.axial.wavelength, "m"));
    row("ground-state FWHM (radial)", format_si(r.fwhm_ground, "m"));
    row("momentum limit h/w", format_si(r.p_limit, "N·s"));
    row("momentum threshold", format_si(r.p_threshold, "N·s"));
    row("critical energy", format_si(r.critical_energy, "J"));
    row("E_r / critical energy", format_si(r.radial_energy_ratio, ""));
    row("knockout v_max", format_si(r.knockout_vmax, "m/s"));
    row("knockout duration", format_si(r.knockout_duration, "s"));
    row("knockout drift", format_si(r.knockout_drift, "m"));
    row("lens v_x", format_si(r.lens.v_x, "m/s"));
    row("lens p_x", format_si(r.lens.p_x, "N·s"));
    os << "Checks:\n";
    for (const auto& c : r.checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "  %-22s %-4s %s %s %s\n", c.name.c_str(),
                      c.pass ? "PASS" : "FAIL", format_si(c.value, c.unit).c_str(),
                      c.comparison.c_str(), format_si(c.threshold, c.unit).c_str());
        os << buf;
    }
    for (const auto& w : r.warnings)
        os << "warning: " << w << "\n";
    return os.str();
}

}  // namespace slitlab::feasibility
