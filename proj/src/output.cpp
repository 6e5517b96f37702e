#include "slitlab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "slitlab/errors.hpp"

namespace slitlab::io {

const char* const profile_header = "x_m,intensity";
const char* const field_header = "x_m,re,im";
const char* const events_header = "index,x_m";
const char* const onset_header = "L_m,fresnel_number,visibility,below_threshold,error";
const char* const compare_header = "x_m,h0,h1,difference";
const char* const sweep_index_header = "step,x_b_m,x_p_m,d_m,mode_count,file";
const char* const checks_header = "name,quantity,value,comparison,threshold,unit,pass";

std::string format_number(double v)
{
    if (v == 0.0)
        v = 0.0;  // no "-0" in the files
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

namespace {

// CSV field quoting for free text (error messages).
std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string fixed2(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string profile_csv(const IntensityProfile& p)
{
    std::string out = std::string(profile_header) + "\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        out += format_number(p.x[i]) + "," + format_number(p.values[i]) + "\n";
    return out;
}

std::string field_csv(const wavefield::ComplexField& f)
{
    std::string out = std::string(field_header) + "\n";
    for (std::size_t i = 0; i < f.amplitudes.size(); ++i)
        out += format_number(f.grid.x(i)) + "," + format_number(f.amplitudes[i].real()) + "," +
               format_number(f.amplitudes[i].imag()) + "\n";
    return out;
}

std::string events_csv(const std::vector<detector::DetectionEvent>& ev)
{
    std::string out = std::string(events_header) + "\n";
    for (const auto& e : ev)
        out += std::to_string(e.sequence_index) + "," + format_number(e.x) + "\n";
    return out;
}

std::string onset_csv(const std::vector<hypothesis::OnsetRow>& rows)
{
    std::string out = std::string(onset_header) + "\n";
    for (const auto& r : rows) {
        out += format_number(r.distance) + "," + format_number(r.fresnel_number) + ",";
        out += r.visibility ? format_number(*r.visibility) : std::string();
        out += std::string(",") + (r.below_threshold ? "1" : "0") + "," + csv_text(r.error) + "\n";
    }
    return out;
}

std::string compare_csv(const hypothesis::Comparison& c)
{
    std::string out = std::string(compare_header) + "\n";
    for (std::size_t i = 0; i < c.x.size(); ++i)
        out += format_number(c.x[i]) + "," + format_number(c.h0_screen[i]) + "," +
               format_number(c.h1_screen[i]) + "," +
               format_number(c.h1_screen[i] - c.h0_screen[i]) + "\n";
    return out;
}

std::string checks_csv(const feasibility::FeasibilityReport& r)
{
    std::string out = std::string(checks_header) + "\n";
    for (const auto& c : r.checks)
        out += csv_text(c.name) + "," + csv_text(c.quantity) + "," + format_number(c.value) + "," +
               c.comparison + "," + format_number(c.threshold) + "," + csv_text(c.unit) + "," +
               (c.pass ? "1" : "0") + "\n";
    return out;
}

std::string sweep_index_csv(const std::vector<SweepIndexRow>& rows)
{
    std::string out = std::string(sweep_index_header) + "\n";
    for (const auto& r : rows)
        out += std::to_string(r.step) + "," + format_number(r.x_b) + "," + format_number(r.x_p) +
               "," + format_number(r.d) + "," + std::to_string(r.mode_count) + "," +
               csv_text(r.file) + "\n";
    return out;
}

json features_json(const pattern::PatternFeatures& f)
{
    json j;
    json z = json::object(), fm = json::object();
    for (const auto& e : f.minima)
        z[std::to_string(e.k)] = {{"x_m", e.x}, {"value", e.value}};
    for (const auto& e : f.maxima)
        fm[std::to_string(e.k)] = {{"x_m", e.x}, {"value", e.value}};
    j["z"] = z;
    j["f"] = fm;
    j["W_m"] = f.W ? json(*f.W) : json(nullptr);
    j["fringe_period_m"] = f.fringe_period ? json(*f.fringe_period) : json(nullptr);
    json vis = json::object();
    for (const auto& [k, v] : f.visibility)
        vis[k] = v;
    j["visibility"] = vis;
    return j;
}

json buildup_json(const detector::BuildUp& b)
{
    return {{"seed", b.seed},
            {"checkpoints", b.checkpoints},
            {"bin_edges_m", b.bin_edges},
            {"histograms", b.histograms}};
}

json feasibility_json(const feasibility::FeasibilityReport& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"quantity", c.quantity},
                          {"value", c.value},
                          {"comparison", c.comparison},
                          {"threshold", c.threshold},
                          {"unit", c.unit},
                          {"pass", c.pass}});
    auto zp = [](const feasibility::ZeroPoint& z) {
        return json{{"E_eV", z.E}, {"wavelength_m", z.wavelength}, {"p_Ns", z.p}};
    };
    return {{"species", r.species},
            {"t_fall_s", r.t_fall},
            {"v_impact_m_s", r.v_impact},
            {"E_k_eV", r.E_k},
            {"lambda_dB_m", r.lambda_dB},
            {"lambda_dB_nonrel_m", r.lambda_dB_nonrel},
            {"radial", zp(r.radial)},
            {"axial", zp(r.axial)},
            {"fwhm_ground_m", r.fwhm_ground},
            {"p_limit_Ns", r.p_limit},
            {"p_threshold_Ns", r.p_threshold},
            {"critical_energy_J", r.critical_energy},
            {"radial_energy_ratio", r.radial_energy_ratio},
            {"knockout_vmax_m_s", r.knockout_vmax},
            {"knockout_duration_s", r.knockout_duration},
            {"knockout_drift_m", r.knockout_drift},
            {"knockout_p_Ns", r.knockout_p},
            {"lens", {{"v_x_m_s", r.lens.v_x}, {"p_x_Ns", r.lens.p_x}}},
            {"checks", checks},
            {"all_pass", r.all_pass()},
            {"warnings", r.warnings}};
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG

std::pair<double, std::string> si_prefix_for(double span)
{
    static const std::pair<double, const char*> prefixes[] = {
        {1e3, "km"}, {1.0, "m"}, {1e-3, "mm"}, {1e-6, "um"}, {1e-9, "nm"}, {1e-12, "pm"}, {1e-15, "fm"}};
    const double a = std::abs(span);
    for (const auto& [scale, name] : prefixes)
        if (a >= scale)
            return {scale, name};
    return {1e-15, "fm"};
}

namespace {

double nice_step(double range)
{
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double m = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
    return m * mag;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

struct Frame {
    double x0, y0, w, h;       // plot area in px
    double lo, hi;             // data x range, m
    double ymax;               // data y at the top edge
    double px(double x) const { return x0 + (x - lo) / (hi - lo) * w; }
    double py(double y) const { return y0 + h - y / ymax * h; }
};

void draw_axes(std::ostringstream& os, const Frame& f)
{
    const auto [scale, unit] = si_prefix_for(std::max(std::abs(f.lo), std::abs(f.hi)));
    os << "<rect class=\"frame\" x=\"" << fixed2(f.x0) << "\" y=\"" << fixed2(f.y0) << "\" width=\""
       << fixed2(f.w) << "\" height=\"" << fixed2(f.h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    const double lo = f.lo / scale, hi = f.hi / scale;
    const double step = nice_step(hi - lo);
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        const double x = f.px(t * scale);
        os << "<line class=\"tick\" x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(f.y0 + f.h)
           << "\" x2=\"" << fixed2(x) << "\" y2=\"" << fixed2(f.y0 + f.h + 4)
           << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(f.y0 + f.h + 16)
           << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = 0.25 * i;
        const double y = f.py(v);
        os << "<line class=\"tick\" x1=\"" << fixed2(f.x0 - 4) << "\" y1=\"" << fixed2(y)
           << "\" x2=\"" << fixed2(f.x0) << "\" y2=\"" << fixed2(y) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << fixed2(f.x0 - 6) << "\" y=\"" << fixed2(y + 3)
           << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
    os << "<text class=\"x-label\" x=\"" << fixed2(f.x0 + f.w / 2) << "\" y=\""
       << fixed2(f.y0 + f.h + 32) << "\" font-size=\"11\" text-anchor=\"middle\">x ("
       << xml_escape(unit) << ")</text>\n";
    os << "<text class=\"y-label\" x=\"" << fixed2(f.x0 - 40) << "\" y=\"" << fixed2(f.y0 + f.h / 2)
       << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " << fixed2(f.x0 - 40)
       << " " << fixed2(f.y0 + f.h / 2) << ")\">relative intensity</text>\n";
}

// Min/max decimation keeps narrow fringes visible on long profiles.
void draw_curve(std::ostringstream& os, const IntensityProfile& p, const Frame& f, double peak,
                const char* colour, const std::string& label)
{
    os << "<polyline class=\"curve\" data-label=\"" << xml_escape(label)
       << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
    const std::size_t n = p.size();
    const std::size_t buckets = 800;
    auto emit = [&](std::size_t i) {
        os << fixed2(f.px(p.x[i])) << "," << fixed2(f.py(p.values[i] / peak)) << " ";
    };
    if (n <= 2 * buckets) {
        for (std::size_t i = 0; i < n; ++i)
            emit(i);
    } else {
        for (std::size_t b = 0; b < buckets; ++b) {
            const std::size_t a = b * n / buckets, e = (b + 1) * n / buckets;
            std::size_t imin = a, imax = a;
            for (std::size_t i = a; i < e; ++i) {
                if (p.values[i] < p.values[imin])
                    imin = i;
                if (p.values[i] > p.values[imax])
                    imax = i;
            }
            emit(std::min(imin, imax));
            if (imin != imax)
                emit(std::max(imin, imax));
        }
    }
    os << "\"/>\n";
}

void draw_markers(std::ostringstream& os, const pattern::PatternFeatures& feat, const Frame& f)
{
    auto inside = [&](double x) { return x >= f.lo && x <= f.hi; };
    for (int k : {-1, 1}) {
        const auto* z = feat.minimum(k);
        if (!z || !inside(z->x))
            continue;
        const double x = f.px(z->x);
        os << "<line class=\"z-marker\" data-k=\"" << k << "\" data-x_m=\"" << format_number(z->x)
           << "\" x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(f.y0) << "\" x2=\"" << fixed2(x)
           << "\" y2=\"" << fixed2(f.y0 + f.h) << "\" stroke=\"#c33\" stroke-dasharray=\"3,3\"/>\n";
        os << "<text x=\"" << fixed2(x + 2) << "\" y=\"" << fixed2(f.y0 + f.h - 4)
           << "\" font-size=\"9\" fill=\"#c33\">z" << k << "</text>\n";
    }
    for (int k : {-1, 0, 1}) {
        const auto* m = feat.maximum(k);
        if (!m || !inside(m->x))
            continue;
        const double x = f.px(m->x);
        os << "<circle class=\"f-marker\" data-k=\"" << k << "\" data-x_m=\"" << format_number(m->x)
           << "\" cx=\"" << fixed2(x) << "\" cy=\"" << fixed2(f.y0 + f.h + 0.0) << "\" r=\"2.5\" fill=\"#36c\"/>\n";
    }
    const auto* zl = feat.minimum(-1);
    const auto* zr = feat.minimum(1);
    if (feat.W && zl && zr && inside(zl->x) && inside(zr->x)) {
        const double a = f.px(zl->x), b = f.px(zr->x), y = f.y0 + 8;
        os << "<path class=\"w-bracket\" data-W_m=\"" << format_number(*feat.W) << "\" d=\"M"
           << fixed2(a) << "," << fixed2(y + 5) << " L" << fixed2(a) << "," << fixed2(y) << " L"
           << fixed2(b) << "," << fixed2(y) << " L" << fixed2(b) << "," << fixed2(y + 5)
           << "\" fill=\"none\" stroke=\"#c33\"/>\n";
        os << "<text x=\"" << fixed2((a + b) / 2) << "\" y=\"" << fixed2(y - 2)
           << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#c33\">W</text>\n";
    }
}

const char* const palette[] = {"#1f4e99", "#c0392b", "#2e8b57", "#8e44ad"};

void draw_panel(std::ostringstream& os, const Panel& panel, double ox, double oy, double w,
                double h)
{
    os << "<g class=\"panel\">\n";
    if (!panel.title.empty())
        os << "<text class=\"panel-title\" x=\"" << fixed2(ox + w / 2) << "\" y=\""
           << fixed2(oy + 14) << "\" font-size=\"11\" text-anchor=\"middle\">"
           << xml_escape(panel.title) << "</text>\n";
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& c : panel.curves) {
        if (c.profile.size() < 2)
            continue;
        lo = any ? std::min(lo, c.profile.front()) : c.profile.front();
        hi = any ? std::max(hi, c.profile.back()) : c.profile.back();
        any = true;
    }
    if (!any || !(hi > lo)) {
        lo = -1.0;
        hi = 1.0;
    }
    Frame f{ox + 56, oy + 22, w - 72, h - 66, lo, hi, 1.08};
    draw_axes(os, f);
    for (std::size_t i = 0; i < panel.curves.size(); ++i) {
        const auto& c = panel.curves[i];
        if (c.profile.size() < 2)
            continue;
        const double peak = c.profile.peak();
        draw_curve(os, c.profile, f, peak > 0.0 ? peak : 1.0, palette[i % 4], c.label);
    }
    if (panel.features)
        draw_markers(os, *panel.features, f);
    if (panel.curves.size() > 1) {
        for (std::size_t i = 0; i < panel.curves.size(); ++i)
            os << "<text class=\"legend\" x=\"" << fixed2(f.x0 + f.w - 4) << "\" y=\""
               << fixed2(f.y0 + 12 + 12.0 * static_cast<double>(i))
               << "\" font-size=\"10\" text-anchor=\"end\" fill=\"" << palette[i % 4] << "\">"
               << xml_escape(panel.curves[i].label) << "</text>\n";
    }
    os << "</g>\n";
}

std::string svg_open(double w, double h, const std::string& title, const std::string& version)
{
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(w) << "\" height=\""
       << fixed2(h) << "\" viewBox=\"0 0 " << fixed2(w) << " " << fixed2(h)
       << "\" font-family=\"sans-serif\">\n"
       << "<title>" << xml_escape(title) << "</title>\n"
       << "<desc>slitlab " << xml_escape(version) << "</desc>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

}  // namespace

std::string emit_plot(const std::vector<Panel>& panels, const std::string& title,
                      const std::string& version)
{
    std::ostringstream os;
    if (panels.size() <= 1) {
        const double w = 640, h = 380;
        os << svg_open(w, h, title, version);
        if (panels.empty())
            draw_panel(os, Panel{}, 0, 0, w, h);
        else
            draw_panel(os, panels.front(), 0, 0, w, h);
    } else {
        const std::size_t cols = std::min<std::size_t>(3, panels.size());
        const std::size_t rows = (panels.size() + cols - 1) / cols;
        const double pw = 320, ph = 230, top = 24;
        os << svg_open(pw * static_cast<double>(cols), top + ph * static_cast<double>(rows), title,
                       version);
        os << "<text x=\"" << fixed2(pw * static_cast<double>(cols) / 2)
           << "\" y=\"16\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(title)
           << "</text>\n";
        for (std::size_t i = 0; i < panels.size(); ++i)
            draw_panel(os, panels[i], pw * static_cast<double>(i % cols),
                       top + ph * static_cast<double>(i / cols), pw, ph);
    }
    os << "</svg>\n";
    return os.str();
}

std::string emit_histogram(const detector::BuildUp& b, std::size_t checkpoint,
                           const std::string& version)
{
    const double w = 640, h = 300;
    const std::string title = "detections after " + std::to_string(b.checkpoints.at(checkpoint));
    std::ostringstream os;
    os << svg_open(w, h, title, version);
    os << "<g class=\"panel\">\n";
    os << "<text class=\"panel-title\" x=\"" << fixed2(w / 2)
       << "\" y=\"14\" font-size=\"11\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
    const auto& hist = b.histograms.at(checkpoint);
    const std::uint64_t top = hist.empty() ? 1 : std::max<std::uint64_t>(1, *std::max_element(hist.begin(), hist.end()));
    Frame f{56, 22, w - 72, h - 66, b.bin_edges.front(), b.bin_edges.back(), 1.08};
    draw_axes(os, f);
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const double x0 = f.px(b.bin_edges[i]), x1 = f.px(b.bin_edges[i + 1]);
        const double y = f.py(static_cast<double>(hist[i]) / static_cast<double>(top));
        os << "<rect class=\"bar\" data-count=\"" << hist[i] << "\" x=\"" << fixed2(x0)
           << "\" y=\"" << fixed2(y) << "\" width=\"" << fixed2(std::max(0.0, x1 - x0 - 0.5))
           << "\" height=\"" << fixed2(f.y0 + f.h - y) << "\" fill=\"#1f4e99\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

}  // namespace slitlab::io
