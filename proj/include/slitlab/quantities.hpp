#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace slitlab::quantities {

/// SI constants used throughout. Values are CODATA 2018 (exact where the SI
/// defines them); g is the conventional 9.81 m/s^2 and may be overridden.
struct PhysicalConstants {
    double planck_h = 6.62607015e-34;      // J s
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);
    double light_c = 299792458.0;          // m/s
    double grav_g = 9.81;                  // m/s^2
    double boltzmann_kB = 1.380649e-23;    // J/K
    double electron_mass = 9.1093837015e-31;  // kg
    double amu = 1.66053906660e-27;        // kg
    double electronvolt = 1.602176634e-19; // J

    /// Same constants with a different local gravity.
    PhysicalConstants with_gravity(double g) const;
};

/// Default constant set (g = 9.81 m/s^2).
const PhysicalConstants& constants();

inline double joule_to_ev(double joule) { return joule / constants().electronvolt; }
inline double ev_to_joule(double ev) { return ev * constants().electronvolt; }

struct Species {
    std::string name;
    double mass = 0.0;         // kg; zero only for the photon sentinel
    double rest_energy = 0.0;  // eV
    std::string charge_label;

    bool massless() const { return mass == 0.0; }
    bool operator==(const Species&) const = default;
};

/// Species registry. Starts with the built-in table; run configurations may
/// register additional entries.
class SpeciesTable {
public:
    SpeciesTable();

    const Species& lookup(const std::string& name) const;
    bool contains(const std::string& name) const;

    /// Adds or replaces an entry. Throws DomainError for non-positive mass.
    const Species& add(const std::string& name, double mass_kg,
                       std::string charge_label = "neutral");

    std::vector<std::string> names() const;

private:
    std::map<std::string, Species> entries_;
};

/// Built-in table lookup: Ca+, Ca, Be+, Na, electron, neutron, photon.
/// Throws UnknownSpeciesError naming the label.
const Species& species_lookup(const std::string& name);

/// m c^2 in eV. Throws DomainError for the massless sentinel.
double rest_energy_of(const Species& species);

/// Species record for an atomic mass in amu, rest energy filled from m c^2.
Species make_species(std::string name, double mass_kg, std::string charge_label);

}  // namespace slitlab::quantities
