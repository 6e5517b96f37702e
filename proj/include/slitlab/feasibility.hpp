#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slitlab/quantities.hpp"

namespace slitlab::feasibility {

using quantities::PhysicalConstants;
using quantities::Species;

struct FreeFall {
    double t = 0.0;    // s
    double v = 0.0;    // m/s
    double E_k = 0.0;  // eV
};

/// t = sqrt(2 h / g), v = g t, E_k = m g h.
FreeFall free_fall(double drop_height, const Species& species,
                   const PhysicalConstants& k = quantities::constants());

/// Drop height that gives kinetic energy E_k (eV) at the slit.
double drop_height_for_energy(double E_k, const Species& species,
                              const PhysicalConstants& k = quantities::constants());

struct DeBroglie {
    double wavelength = 0.0;                 // hc / sqrt(2 E_k E_0)
    double wavelength_nonrelativistic = 0.0; // h / sqrt(2 m E_k)
    std::vector<std::string> warnings;
};

/// E_k in eV. Throws DomainError for E_k <= 0.
DeBroglie de_broglie(double E_k, const Species& species);

struct ZeroPoint {
    double E = 0.0;           // eV, h nu / 2
    double wavelength = 0.0;  // m
    double p = 0.0;           // N s
};

ZeroPoint zero_point(double freq, const Species& species);

/// FWHM of the ground-state amplitude exp(-alpha x^2 / 2), alpha = m omega / hbar.
double ground_state_fwhm(double freq, const Species& species);

struct MomentumBudget {
    double p_limit = 0.0;      // h / slit_width
    double p_threshold = 0.0;  // p_limit / margin
};

MomentumBudget momentum_budget(double slit_width, double margin_factor);

struct EnergyEquivalents {
    double E = 0.0;   // J, p^2 / 2m
    double T = 0.0;   // K, from E = kB T / 2
    double nu = 0.0;  // Hz, from E = h nu / 2
};

EnergyEquivalents energy_equivalents(double p, const Species& species);

// Inverses used for unit round-trips.
double momentum_from_energy(double E_joule, const Species& species);
double energy_from_temperature(double T);
double energy_from_frequency(double nu);

struct LensShift {
    double v_x = 0.0;  // m/s
    double p_x = 0.0;  // N s
};

LensShift lens_shift_budget(double offset, double fall_time, const Species& species);

/// Time the knockout must be sustained to select |v_x| <= v_max.
double knockout_selection(double window, double v_max);
double drift(double v, double t);

/// Drop-experiment design inputs.
struct DropScenario {
    Species species;
    double drop_height = 0.01;        // m
    double slit_width = 200e-9;       // m
    double radial_freq = 1.39e6;      // Hz
    double axial_freq = 134e3;        // Hz
    double beam_window = 2e-6;        // m, knockout selection window
    double lens_offset_max = 50e-6;   // m
    double margin_factor = 100.0;
    double beam_width = 5e-9;         // m, assumed confined beam width
    double wavelength_factor = 10.0;  // lambda must exceed beam width by this
    double drift_budget = 2e-9;       // m, tolerated lateral drift during the fall
    std::optional<double> knockout_vmax;  // m/s; derived from the drift budget when empty
    double gravity = 9.81;

    void validate() const;
};

struct Check {
    std::string name;
    std::string quantity;
    double value = 0.0;
    std::string comparison;  // "<=" or ">="
    double threshold = 0.0;
    std::string unit;
    bool pass = false;
};

struct FeasibilityReport {
    std::string species;
    double t_fall = 0.0;
    double v_impact = 0.0;
    double E_k = 0.0;             // eV
    double lambda_dB = 0.0;
    double lambda_dB_nonrel = 0.0;
    ZeroPoint radial;
    ZeroPoint axial;
    double fwhm_ground = 0.0;     // at the radial frequency
    double p_limit = 0.0;
    double p_threshold = 0.0;
    double critical_energy = 0.0; // J, p_threshold^2 / 2m
    double radial_energy_ratio = 0.0;  // E_r / critical_energy
    double knockout_vmax = 0.0;
    double knockout_duration = 0.0;
    double knockout_drift = 0.0;
    double knockout_p = 0.0;
    LensShift lens;
    std::vector<Check> checks;
    std::vector<std::string> warnings;

    bool all_pass() const;
};

FeasibilityReport evaluate_scenario(const DropScenario& s);

/// Human-readable table with SI-prefixed units.
std::string format_report(const FeasibilityReport& r);

/// "40.75 neV", "45.15 ms", ... (4 significant digits).
std::string format_si(double value, const std::string& unit);

}  // namespace slitlab::feasibility
