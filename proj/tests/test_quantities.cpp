#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slitlab/errors.hpp"
#include "slitlab/quantities.hpp"

using namespace slitlab;
using namespace slitlab::quantities;

TEST_SUITE("quantities") {

TEST_CASE("hbar is h over two pi and every constant is positive")
{
    const auto& k = constants();
    CHECK(k.hbar == doctest::Approx(k.planck_h / (2.0 * std::numbers::pi)).epsilon(1e-15));
    for (double v : {k.planck_h, k.hbar, k.light_c, k.grav_g, k.boltzmann_kB, k.electron_mass,
                     k.amu, k.electronvolt})
        CHECK(v > 0.0);
    CHECK(k.grav_g == 9.81);
}

TEST_CASE("gravity override keeps the other constants")
{
    const auto g = constants().with_gravity(9.80665);
    CHECK(g.grav_g == 9.80665);
    CHECK(g.planck_h == constants().planck_h);
    CHECK_THROWS_AS(constants().with_gravity(0.0), DomainError);
}

TEST_CASE("calcium ion and sodium masses")
{
    // 40.08 amu and 22.99 amu worked out by hand
    CHECK(species_lookup("Ca+").mass == doctest::Approx(6.655e-26).epsilon(1e-3));
    CHECK(species_lookup("Ca+").mass == doctest::Approx(6.7e-26).epsilon(0.01));
    CHECK(species_lookup("Na").mass == doctest::Approx(3.8e-26).epsilon(0.01));
    CHECK(species_lookup("Be+").mass == doctest::Approx(9.012 * 1.66053906660e-27).epsilon(1e-12));
}

TEST_CASE("electron mass comes straight from the constant table")
{
    CHECK(species_lookup("electron").mass == constants().electron_mass);
}

TEST_CASE("unknown species names the label")
{
    try {
        species_lookup("Xe+");
        FAIL("expected an error");
    } catch (const UnknownSpeciesError& e) {
        CHECK(std::string(e.what()).find("Xe+") != std::string::npos);
        CHECK(e.is_validation());
    }
}

TEST_CASE("rest energies")
{
    const double ca = rest_energy_of(species_lookup("Ca+"));
    CHECK(ca == doctest::Approx(37.33e9).epsilon(1e-3));
    CHECK(std::abs(ca - 38e9) / 38e9 < 0.03);
    // 9.012 amu * 931.494 MeV per amu
    CHECK(rest_energy_of(species_lookup("Be+")) == doctest::Approx(9.012 * 931.49410242e6).epsilon(1e-6));
    CHECK(rest_energy_of(species_lookup("electron")) == doctest::Approx(510998.95).epsilon(1e-6));
    CHECK_THROWS_AS(rest_energy_of(species_lookup("photon")), DomainError);
}

TEST_CASE("stored rest energy agrees with m c^2 for every built-in species")
{
    SpeciesTable table;
    const double c = constants().light_c;
    for (const auto& name : table.names()) {
        const auto& s = table.lookup(name);
        if (s.massless())
            continue;
        CAPTURE(name);
        const double ratio = s.rest_energy * constants().electronvolt / (s.mass * c * c);
        CHECK(ratio >= 0.98);
        CHECK(ratio <= 1.02);
        CHECK(s.mass > 0.0);
    }
}

TEST_CASE("lookup is pure")
{
    const Species a = species_lookup("Na");
    const Species b = species_lookup("Na");
    CHECK(a == b);
}

TEST_CASE("registered species")
{
    SpeciesTable table;
    const auto& xe = table.add("Xe+", 131.29 * constants().amu, "+1");
    CHECK(table.lookup("Xe+") == xe);
    CHECK(xe.rest_energy > 0.0);
    CHECK_THROWS_AS(table.add("bad", -1.0), DomainError);
    CHECK_THROWS_AS(table.add("zero", 0.0), DomainError);
}

TEST_CASE("eV conversions invert each other")
{
    for (double e : {1e-9, 1.5, 3.7e4})
        CHECK(joule_to_ev(ev_to_joule(e)) == doctest::Approx(e).epsilon(1e-15));
}

}
