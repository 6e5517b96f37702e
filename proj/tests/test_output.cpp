#include <doctest.h>

#include <regex>

#include "oracles.hpp"
#include "slitlab/output.hpp"

using namespace slitlab;
using namespace slitlab::io;

namespace {

IntensityProfile electron_pattern()
{
    const double dx = 0.25e-6;
    std::vector<double> v(1601);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = oracle::sinc2(-200e-6 + static_cast<double>(i) * dx, 20e-6, 1e-9, 1.0);
    return make_profile(-200e-6, dx, std::move(v), true);
}

std::vector<double> attribute_values(const std::string& svg, const std::string& cls, const std::string& attr)
{
    std::vector<double> out;
    const std::regex re("class=\"" + cls + "\"[^>]*" + attr + "=\"([^\"]+)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back(std::stod((*it)[1].str()));
    return out;
}

std::size_t count_of(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1))
        ++n;
    return n;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("output")
{
    TEST_CASE("CSV headers are fixed")
    {
        CHECK(std::string(profile_header) == "x_m,intensity");
        CHECK(std::string(field_header) == "x_m,re,im");
        CHECK(std::string(events_header) == "index,x_m");
        CHECK(std::string(onset_header) == "L_m,fresnel_number,visibility,below_threshold,error");
        CHECK(std::string(compare_header) == "x_m,h0,h1,difference");
        CHECK(std::string(sweep_index_header) == "step,x_b_m,x_p_m,d_m,mode_count,file");
        CHECK(std::string(checks_header) == "name,quantity,value,comparison,threshold,unit,pass");
    }

    TEST_CASE("number format: 12 significant digits, C locale")
    {
        CHECK(format_number(0.0) == "0.00000000000e+00");
        CHECK(format_number(-0.0) == "0.00000000000e+00");
        CHECK(format_number(1e-9) == "1.00000000000e-09");
        CHECK(format_number(-123456.789012345) == "-1.23456789012e+05");
        CHECK(format_number(1.0 / 3.0) == "3.33333333333e-01");
    }

    TEST_CASE("profile CSV golden text")
    {
        const auto p = make_profile(-1e-6, 1e-6, {0.25, 0.5, 0.25}, false);
        CHECK(profile_csv(p) ==
              "x_m,intensity\n"
              "-1.00000000000e-06,2.50000000000e-01\n"
              "0.00000000000e+00,5.00000000000e-01\n"
              "1.00000000000e-06,2.50000000000e-01\n");
    }

    TEST_CASE("events, onset, sweep index and checks CSVs")
    {
        std::vector<detector::DetectionEvent> ev{{1.5e-6, 0}, {-2e-6, 1}};
        CHECK(events_csv(ev) == "index,x_m\n0,1.50000000000e-06\n1,-2.00000000000e-06\n");

        hypothesis::OnsetRow ok{10.0, 0.01, 0.995, false, ""};
        hypothesis::OnsetRow bad{1.0, 0.1, std::nullopt, false, "grid, too small"};
        const auto onset = onset_csv({ok, bad});
        CHECK(first_line(onset) == onset_header);
        CHECK(onset.find("1.00000000000e+01,1.00000000000e-02,9.95000000000e-01,0,\n") != std::string::npos);
        CHECK(onset.find(",,0,\"grid, too small\"\n") != std::string::npos);

        const auto index = sweep_index_csv({{0, 0.0, 0.0, 2.5e-5, 1, "step_00.csv"}});
        CHECK(index == "step,x_b_m,x_p_m,d_m,mode_count,file\n"
                       "0,0.00000000000e+00,0.00000000000e+00,2.50000000000e-05,1,step_00.csv\n");

        feasibility::FeasibilityReport r;
        r.checks.push_back({"a", "q", 1.0, "<=", 2.0, "m", true});
        CHECK(checks_csv(r) == "name,quantity,value,comparison,threshold,unit,pass\n"
                               "a,q,1.00000000000e+00,<=,2.00000000000e+00,m,1\n");
    }

    TEST_CASE("CSV output is LF-only")
    {
        const auto text = profile_csv(electron_pattern());
        CHECK(text.find('\r') == std::string::npos);
        CHECK(text.back() == '\n');
    }

    TEST_CASE("features JSON")
    {
        const auto f = pattern::find_extrema(electron_pattern());
        const auto j = features_json(f);
        REQUIRE(j.contains("W_m"));
        CHECK(j["W_m"].get<double>() == doctest::Approx(100e-6).epsilon(0.01));
        CHECK(j["z"].contains("-1"));
        CHECK(j["z"].contains("1"));
        CHECK(j["f"].contains("0"));
        const auto empty = features_json(pattern::PatternFeatures{});
        CHECK(empty["W_m"].is_null());
        CHECK(empty["z"].empty());
        CHECK(dump(j).back() == '\n');
    }

    TEST_CASE("single sinc^2 plot has z-markers at +-lambda L / w")
    {
        const auto p = electron_pattern();
        const auto svg = emit_plot({Panel{{Curve{p, "H0"}}, pattern::find_extrema(p), "sinc2"}}, "t", "0.1.0");
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
        const auto z = attribute_values(svg, "z-marker", "data-x_m");
        REQUIRE(z.size() == 2);
        CHECK(z[0] == doctest::Approx(-50e-6).epsilon(0.01));
        CHECK(z[1] == doctest::Approx(50e-6).epsilon(0.01));
        CHECK(attribute_values(svg, "f-marker", "data-x_m").size() == 3);
        CHECK(count_of(svg, "class=\"w-bracket\"") == 1);
        // SI-prefixed axis
        CHECK(svg.find("um") != std::string::npos);
    }

    TEST_CASE("plot without annotations is a plain curve")
    {
        const auto svg = emit_plot({Panel{{Curve{electron_pattern(), "H0"}}, std::nullopt, ""}}, "t", "0.1.0");
        CHECK(count_of(svg, "class=\"curve\"") == 1);
        CHECK(count_of(svg, "z-marker") == 0);
        CHECK(count_of(svg, "f-marker") == 0);
        CHECK(count_of(svg, "w-bracket") == 0);
    }

    TEST_CASE("sweep family renders one panel per step")
    {
        const auto sweep = hypothesis::sweep_xb(hypothesis::default_sweep_scenario(), {}, 9);
        std::vector<Panel> panels;
        for (const auto& st : sweep)
            panels.push_back(Panel{{Curve{st.prediction.profile, "H1"}}, std::nullopt, "x_b"});
        const auto svg = emit_plot(panels, "sweep", "0.1.0");
        CHECK(count_of(svg, "<g class=\"panel\">") == 9);
        CHECK(count_of(svg, "class=\"curve\"") == 9);
    }

    TEST_CASE("plots are deterministic and carry the version")
    {
        const auto p = electron_pattern();
        const Panel panel{{Curve{p, "H0"}}, pattern::find_extrema(p), "x"};
        const auto a = emit_plot({panel}, "t", "9.9.9");
        CHECK(a == emit_plot({panel}, "t", "9.9.9"));
        CHECK(a.find("9.9.9") != std::string::npos);
    }

    TEST_CASE("histogram SVG")
    {
        const auto b = detector::build_up(electron_pattern(), {100, 1000}, 16, 7);
        const auto svg = emit_histogram(b, 1, "0.1.0");
        CHECK(count_of(svg, "class=\"bar\"") == 16);
        std::uint64_t total = 0;
        for (double c : attribute_values(svg, "bar", "data-count"))
            total += static_cast<std::uint64_t>(c);
        CHECK(total == 1000);
        CHECK(buildup_json(b)["histograms"].size() == 2);
    }

    TEST_CASE("SHA-256 known vectors")
    {
        CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("SI prefix choice")
    {
        CHECK(si_prefix_for(200e-6).second == "um");
        CHECK(si_prefix_for(2e-9).second == "nm");
        CHECK(si_prefix_for(5.0).second == "m");
        CHECK(si_prefix_for(200e-6).first == doctest::Approx(1e-6));
    }
}
