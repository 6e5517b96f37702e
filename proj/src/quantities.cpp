#include "slitlab/quantities.hpp"

#include "slitlab/errors.hpp"

namespace slitlab::quantities {

namespace {

// Standard atomic weights (amu). Ion masses ignore the missing electron;
// the deficit is below 0.01% for every ion listed here.
constexpr double kCalciumAmu = 40.08;
constexpr double kBerylliumAmu = 9.012;
constexpr double kSodiumAmu = 22.99;
constexpr double kNeutronKg = 1.67492749804e-27;

}  // namespace

PhysicalConstants PhysicalConstants::with_gravity(double g) const
{
    if (!(g > 0.0))
        throw DomainError("gravity must be positive");
    PhysicalConstants out = *this;
    out.grav_g = g;
    return out;
}

const PhysicalConstants& constants()
{
    static const PhysicalConstants k{};
    return k;
}

Species make_species(std::string name, double mass_kg, std::string charge_label)
{
    Species s;
    s.name = std::move(name);
    s.mass = mass_kg;
    s.charge_label = std::move(charge_label);
    if (mass_kg > 0.0)
        s.rest_energy = rest_energy_of(s);
    return s;
}

SpeciesTable::SpeciesTable()
{
    const auto& k = constants();
    add("Ca+", kCalciumAmu * k.amu, "+1");
    add("Ca", kCalciumAmu * k.amu, "neutral");
    add("Be+", kBerylliumAmu * k.amu, "+1");
    add("Na", kSodiumAmu * k.amu, "neutral");
    add("electron", k.electron_mass, "-1");
    add("neutron", kNeutronKg, "neutral");
    entries_["photon"] = Species{"photon", 0.0, 0.0, "neutral"};
}

const Species& SpeciesTable::lookup(const std::string& name) const
{
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw UnknownSpeciesError("unknown species '" + name + "'");
    return it->second;
}

bool SpeciesTable::contains(const std::string& name) const
{
    return entries_.count(name) != 0;
}

const Species& SpeciesTable::add(const std::string& name, double mass_kg,
                                 std::string charge_label)
{
    if (!(mass_kg > 0.0))
        throw DomainError("species '" + name + "' needs a positive mass");
    auto& slot = entries_[name];
    slot = make_species(name, mass_kg, std::move(charge_label));
    return slot;
}

std::vector<std::string> SpeciesTable::names() const
{
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, _] : entries_)
        out.push_back(name);
    return out;
}

const Species& species_lookup(const std::string& name)
{
    static const SpeciesTable builtin;
    return builtin.lookup(name);
}

double rest_energy_of(const Species& species)
{
    if (species.massless())
        throw DomainError("species '" + species.name +
                          "' is massless; photon kinematics are not supported");
    const auto& k = constants();
    return species.mass * k.light_c * k.light_c / k.electronvolt;
}

}  // namespace slitlab::quantities
