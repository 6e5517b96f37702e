#include "slitlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "slitlab/errors.hpp"
#include "slitlab/quantities.hpp"

namespace slitlab::cli {

namespace {

// ---------------------------------------------------------------------------
// TOML subset parser

class TomlParser {
public:
    explicit TomlParser(std::string_view text) : s_(text) {}

    TomlDocument parse()
    {
        TomlDocument doc;
        std::string table;
        while (!eof()) {
            skip_blank();
            if (eof())
                break;
            const char c = peek();
            if (c == '\n' || c == '\r') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                const int line = line_;
                advance();
                skip_blank();
                table = join(parse_key_path());
                skip_blank();
                expect(']');
                end_of_line();
                if (!doc.tables.emplace(table, line).second)
                    fail("duplicate table [" + table + "]");
                continue;
            }
            const int line = line_, column = col_;
            const std::string key = join(parse_key_path());
            skip_blank();
            expect('=');
            skip_blank();
            TomlValue v = parse_value();
            end_of_line();
            const std::string full = table.empty() ? key : table + "." + key;
            if (doc.entries.count(full)) {
                line_ = line;
                col_ = column;
                fail("duplicate key '" + full + "'");
            }
            doc.entries.emplace(full, std::move(v));
        }
        return doc;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    char advance()
    {
        const char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        std::ostringstream os;
        os << "parse error at line " << line_ << ", column " << col_ << ": " << msg;
        throw ConfigError(ErrorKind::config_parse, os.str(), {}, line_, col_);
    }

    void expect(char c)
    {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }

    void skip_blank()
    {
        while (!eof() && (peek() == ' ' || peek() == '\t'))
            advance();
    }

    void skip_comment()
    {
        while (!eof() && peek() != '\n')
            advance();
    }

    // Whitespace, newlines and comments (inside arrays).
    void skip_space()
    {
        for (;;) {
            skip_blank();
            if (peek() == '#')
                skip_comment();
            else if (peek() == '\n' || peek() == '\r')
                advance();
            else
                return;
        }
    }

    void end_of_line()
    {
        skip_blank();
        if (peek() == '#')
            skip_comment();
        if (peek() == '\r')
            advance();
        if (!eof() && peek() != '\n')
            fail("unexpected trailing characters");
    }

    static bool bare_key_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::vector<std::string> parse_key_path()
    {
        std::vector<std::string> parts;
        for (;;) {
            skip_blank();
            if (peek() == '"') {
                parts.push_back(parse_string());
            } else {
                std::string key;
                while (!eof() && bare_key_char(peek()))
                    key += advance();
                if (key.empty())
                    fail("expected a key");
                parts.push_back(key);
            }
            skip_blank();
            if (peek() != '.')
                return parts;
            advance();
        }
    }

    static std::string join(const std::vector<std::string>& parts)
    {
        std::string out;
        for (const auto& p : parts) {
            if (!out.empty())
                out += '.';
            out += p;
        }
        return out;
    }

    std::string parse_string()
    {
        expect('"');
        std::string out;
        for (;;) {
            if (eof() || peek() == '\n')
                fail("unterminated string");
            const char c = advance();
            if (c == '"')
                return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof())
                fail("unterminated escape");
            switch (const char e = advance()) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: fail(std::string("unsupported escape '\\") + e + "'");
            }
        }
    }

    TomlValue parse_value()
    {
        TomlValue v;
        v.line = line_;
        v.column = col_;
        const char c = peek();
        if (c == '"') {
            v.data = parse_string();
        } else if (c == '[') {
            advance();
            TomlValue::Array items;
            for (;;) {
                skip_space();
                if (peek() == ']') {
                    advance();
                    break;
                }
                items.push_back(parse_value());
                skip_space();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                if (peek() == ']') {
                    advance();
                    break;
                }
                fail("expected ',' or ']' in array");
            }
            v.data = std::move(items);
        } else if (s_.substr(pos_, 4) == "true") {
            for (int i = 0; i < 4; ++i)
                advance();
            v.data = true;
        } else if (s_.substr(pos_, 5) == "false") {
            for (int i = 0; i < 5; ++i)
                advance();
            v.data = false;
        } else if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            std::string tok;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
                              peek() == '+' || peek() == '-'))
                tok += advance();
            std::string_view body = tok;
            if (!body.empty() && body.front() == '+')
                body.remove_prefix(1);
            const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
            if (is_float) {
                double d = 0.0;
                auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), d);
                if (ec != std::errc{} || p != body.data() + body.size())
                    fail("malformed number '" + tok + "'");
                v.data = d;
            } else {
                std::int64_t i = 0;
                auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), i);
                if (ec != std::errc{} || p != body.data() + body.size())
                    fail("malformed integer '" + tok + "'");
                v.data = i;
            }
        } else {
            fail("expected a value");
        }
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Units

struct UnitDef {
    Dimension dim;
    double factor;   // multiply when > 0
    double divisor;  // divide when > 0 (keeps 1nm == 1e-9 exactly rounded)
};

const std::map<std::string, UnitDef, std::less<>>& unit_table()
{
    static const auto table = [] {
        std::map<std::string, UnitDef, std::less<>> t;
        const auto& k = quantities::constants();
        auto div = [](Dimension d, double x) { return UnitDef{d, 0.0, x}; };
        auto mul = [](Dimension d, double x) { return UnitDef{d, x, 0.0}; };
        using D = Dimension;
        t["m"] = mul(D::length, 1.0);
        t["km"] = mul(D::length, 1e3);
        t["cm"] = div(D::length, 1e2);
        t["mm"] = div(D::length, 1e3);
        t["um"] = t["μm"] = div(D::length, 1e6);
        t["nm"] = div(D::length, 1e9);
        t["pm"] = div(D::length, 1e12);
        t["fm"] = div(D::length, 1e15);
        t["J"] = mul(D::energy, 1.0);
        t["eV"] = mul(D::energy, k.electronvolt);
        t["meV"] = mul(D::energy, k.electronvolt * 1e-3);
        t["ueV"] = t["μeV"] = mul(D::energy, k.electronvolt * 1e-6);
        t["neV"] = mul(D::energy, k.electronvolt * 1e-9);
        t["keV"] = mul(D::energy, k.electronvolt * 1e3);
        t["MeV"] = mul(D::energy, k.electronvolt * 1e6);
        t["GeV"] = mul(D::energy, k.electronvolt * 1e9);
        t["Hz"] = mul(D::frequency, 1.0);
        t["mHz"] = div(D::frequency, 1e3);
        t["kHz"] = mul(D::frequency, 1e3);
        t["MHz"] = mul(D::frequency, 1e6);
        t["GHz"] = mul(D::frequency, 1e9);
        t["s"] = mul(D::time, 1.0);
        t["ms"] = div(D::time, 1e3);
        t["us"] = t["μs"] = div(D::time, 1e6);
        t["ns"] = div(D::time, 1e9);
        t["kg"] = mul(D::mass, 1.0);
        t["amu"] = t["Da"] = mul(D::mass, k.amu);
        t["m/s"] = mul(D::velocity, 1.0);
        t["mm/s"] = div(D::velocity, 1e3);
        t["um/s"] = t["μm/s"] = div(D::velocity, 1e6);
        t["nm/s"] = div(D::velocity, 1e9);
        return t;
    }();
    return table;
}

const char* base_unit(Dimension d)
{
    switch (d) {
    case Dimension::length: return "m";
    case Dimension::energy: return "J";
    case Dimension::frequency: return "Hz";
    case Dimension::time: return "s";
    case Dimension::mass: return "kg";
    case Dimension::velocity: return "m/s";
    }
    return "";
}

std::string shortest(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

// ---------------------------------------------------------------------------
// Strict reader over a parsed document

class Reader {
public:
    explicit Reader(const TomlDocument& doc) : doc_(doc) {}

    const TomlValue* find(const std::string& key)
    {
        auto it = doc_.entries.find(key);
        if (it == doc_.entries.end())
            return nullptr;
        used_.insert(key);
        return &it->second;
    }

    [[noreturn]] static void value_error(const std::string& key, const std::string& msg,
                                         const TomlValue* v = nullptr)
    {
        throw ConfigError(ErrorKind::config_value, key + ": " + msg, key, v ? v->line : 0,
                          v ? v->column : 0);
    }

    std::optional<std::string> string(const std::string& key)
    {
        const auto* v = find(key);
        if (!v)
            return std::nullopt;
        if (!v->is_string())
            value_error(key, "expected a string", v);
        return std::get<std::string>(v->data);
    }

    static double quantity_of(const TomlValue& v, Dimension dim, const std::string& key)
    {
        if (!v.is_string())
            throw ConfigError(ErrorKind::config_unit,
                              key + ": bare number given; a " + std::string(to_string(dim)) +
                                  " needs a unit suffix",
                              key, v.line, v.column);
        return parse_quantity(std::get<std::string>(v.data), dim, key);
    }

    std::optional<double> quantity(const std::string& key, Dimension dim)
    {
        const auto* v = find(key);
        if (!v)
            return std::nullopt;
        return quantity_of(*v, dim, key);
    }

    std::optional<double> number(const std::string& key)
    {
        const auto* v = find(key);
        if (!v)
            return std::nullopt;
        if (v->is_integer())
            return static_cast<double>(std::get<std::int64_t>(v->data));
        if (v->is_float())
            return std::get<double>(v->data);
        value_error(key, "expected a number", v);
    }

    std::optional<std::int64_t> integer(const std::string& key)
    {
        const auto* v = find(key);
        if (!v)
            return std::nullopt;
        if (!v->is_integer())
            value_error(key, "expected an integer", v);
        return std::get<std::int64_t>(v->data);
    }

    std::optional<std::uint64_t> count(const std::string& key)
    {
        auto i = integer(key);
        if (!i)
            return std::nullopt;
        if (*i < 0)
            value_error(key, "must be non-negative", find(key));
        return static_cast<std::uint64_t>(*i);
    }

    std::optional<bool> boolean(const std::string& key)
    {
        const auto* v = find(key);
        if (!v)
            return std::nullopt;
        if (!v->is_bool())
            value_error(key, "expected true or false", v);
        return std::get<bool>(v->data);
    }

    const TomlValue::Array* array(const std::string& key)
    {
        const auto* v = find(key);
        if (!v)
            return nullptr;
        if (!v->is_array())
            value_error(key, "expected an array", v);
        return &std::get<TomlValue::Array>(v->data);
    }

    void reject_unused() const
    {
        for (const auto& [key, v] : doc_.entries) {
            if (!used_.count(key))
                throw ConfigError(ErrorKind::config_unknown_key, "unknown key '" + key + "'", key,
                                  v.line, v.column);
        }
    }

private:
    const TomlDocument& doc_;
    std::set<std::string> used_;
};

template <class T>
void take(std::optional<T> v, T& slot, const std::string& key, std::vector<std::string>& defaults,
          const std::string& shown)
{
    if (v)
        slot = *v;
    else
        defaults.push_back(key + " = " + shown);
}

[[noreturn]] void missing(const std::string& key)
{
    throw ConfigError(ErrorKind::config_value, "missing required key '" + key + "'", key);
}

}  // namespace

// ---------------------------------------------------------------------------

TomlDocument parse_toml(std::string_view text)
{
    return TomlParser(text).parse();
}

const char* to_string(Dimension d)
{
    switch (d) {
    case Dimension::length: return "length";
    case Dimension::energy: return "energy";
    case Dimension::frequency: return "frequency";
    case Dimension::time: return "time";
    case Dimension::mass: return "mass";
    case Dimension::velocity: return "velocity";
    }
    return "?";
}

double parse_quantity(std::string_view text, Dimension dim, const std::string& key)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
            s.remove_suffix(1);
        return s;
    };
    std::string_view body = trim(text);
    if (!body.empty() && body.front() == '+')
        body.remove_prefix(1);
    double value = 0.0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || !std::isfinite(value))
        throw ConfigError(ErrorKind::config_unit,
                          key + ": '" + std::string(text) + "' does not start with a number", key);
    const std::string_view unit = trim(body.substr(static_cast<std::size_t>(p - body.data())));
    if (unit.empty())
        throw ConfigError(ErrorKind::config_unit,
                          key + ": '" + std::string(text) + "' has no unit; expected a " +
                              to_string(dim) + " unit such as " + base_unit(dim),
                          key);
    const auto& table = unit_table();
    auto it = table.find(unit);
    if (it == table.end())
        throw ConfigError(ErrorKind::config_unit, key + ": unknown unit '" + std::string(unit) + "'",
                          key);
    if (it->second.dim != dim)
        throw ConfigError(ErrorKind::config_unit,
                          key + ": unit '" + std::string(unit) + "' is a " +
                              to_string(it->second.dim) + ", expected a " + to_string(dim),
                          key);
    return it->second.divisor > 0.0 ? value / it->second.divisor : value * it->second.factor;
}

std::string format_quantity(double si_value, Dimension dim)
{
    return shortest(si_value) + base_unit(dim);
}

const char* to_string(Command c)
{
    switch (c) {
    case Command::simulate: return "simulate";
    case Command::buildup: return "buildup";
    case Command::sweep_xb: return "sweep-xb";
    case Command::onset: return "onset";
    case Command::feasibility: return "feasibility";
    case Command::compare: return "compare";
    }
    return "?";
}

std::optional<Command> command_from_string(std::string_view s)
{
    for (auto c : {Command::simulate, Command::buildup, Command::sweep_xb, Command::onset,
                   Command::feasibility, Command::compare})
        if (s == to_string(c))
            return c;
    return std::nullopt;
}

bool RunConfig::operator==(const RunConfig& o) const
{
    return command == o.command && scenario == o.scenario && model == o.model &&
           sampling == o.sampling && sweep == o.sweep && feasibility == o.feasibility &&
           output == o.output && species == o.species;
}

RunConfig parse_config(std::string_view text)
{
    const TomlDocument doc = parse_toml(text);
    static const std::set<std::string> known_tables = {"scenario", "model",  "sampling", "sweep",
                                                       "feasibility", "output", "species"};
    for (const auto& [table, line] : doc.tables) {
        const std::string head = table.substr(0, table.find('.'));
        const bool nested_ok = head == "species" && table.size() > 8;
        if (!known_tables.count(table) && !nested_ok)
            throw ConfigError(ErrorKind::config_unknown_key, "unknown table [" + table + "]", table,
                              line, 1);
    }

    Reader r(doc);
    RunConfig c;
    auto& defaults = c.defaults_applied;

    const auto command_text = r.string("command");
    if (!command_text)
        missing("command");
    const auto command = command_from_string(*command_text);
    if (!command)
        Reader::value_error("command", "unknown command '" + *command_text + "'");
    c.command = *command;

    // species registrations: [species."Xe+"] mass = "131.29amu"
    std::set<std::string> species_names;
    for (const auto& [key, v] : doc.entries) {
        if (key.rfind("species.", 0) != 0)
            continue;
        const auto last = key.rfind('.');
        if (last <= 8)
            continue;
        species_names.insert(key.substr(8, last - 8));
    }
    for (const auto& [table, line] : doc.tables)
        if (table.rfind("species.", 0) == 0)
            species_names.insert(table.substr(8));
    for (const auto& name : species_names) {
        SpeciesEntry e;
        e.name = name;
        const std::string base = "species." + name + ".";
        const auto mass = r.quantity(base + "mass", Dimension::mass);
        if (!mass)
            missing(base + "mass");
        if (!(*mass > 0.0))
            Reader::value_error(base + "mass", "must be positive");
        e.mass = *mass;
        if (auto charge = r.string(base + "charge"))
            e.charge = *charge;
        c.species.push_back(e);
    }

    // [scenario]
    auto& sc = c.scenario;
    take(r.string("scenario.species"), sc.species, "scenario.species", defaults, "\"electron\"");
    sc.wavelength = r.quantity("scenario.wavelength", Dimension::length);
    sc.energy = r.quantity("scenario.energy", Dimension::energy);
    sc.slit_width = r.quantity("scenario.slit_width", Dimension::length);
    sc.distance = r.quantity("scenario.distance", Dimension::length);
    if (auto src = r.string("scenario.source")) {
        if (*src == "wide")
            sc.source = wavefield::SourceKind::wide;
        else if (*src == "fine")
            sc.source = wavefield::SourceKind::fine;
        else
            Reader::value_error("scenario.source", "expected \"wide\" or \"fine\"");
    } else {
        defaults.push_back("scenario.source = \"wide\"");
    }
    if (auto b = r.quantity("scenario.beam_fwhm", Dimension::length))
        sc.beam_fwhm = *b;
    if (auto xb = r.quantity("scenario.beam_offset", Dimension::length))
        sc.beam_offset = *xb;
    if (auto k = r.string("scenario.kernel")) {
        if (*k == "paraxial")
            sc.kernel = wavefield::Kernel::paraxial;
        else if (*k == "exact")
            sc.kernel = wavefield::Kernel::exact;
        else if (*k != "auto")
            Reader::value_error("scenario.kernel", "expected \"auto\", \"paraxial\" or \"exact\"");
    } else {
        defaults.push_back("scenario.kernel = \"auto\"");
    }
    take(r.count("scenario.grid_samples"), sc.grid_samples, "scenario.grid_samples", defaults,
         "65536");
    sc.grid_spacing = r.quantity("scenario.grid_spacing", Dimension::length);
    if (!sc.grid_spacing)
        defaults.push_back("scenario.grid_spacing = auto");
    take(r.number("scenario.smallness_factor"), sc.smallness_factor, "scenario.smallness_factor",
         defaults, "10");

    // [model]
    auto& m = c.model;
    take(r.number("model.gain"), m.gain, "model.gain", defaults, "1");
    take(r.number("model.width_factor"), m.width_factor, "model.width_factor", defaults, "1");
    if (auto s = r.integer("model.sign")) {
        if (*s != 1 && *s != -1)
            Reader::value_error("model.sign", "must be 1 or -1");
        m.sign = static_cast<int>(*s);
    } else {
        defaults.push_back("model.sign = -1");
    }
    take(r.boolean("model.mask"), m.mask, "model.mask", defaults, "true");

    // [sampling]
    auto& smp = c.sampling;
    take(r.count("sampling.n"), smp.n, "sampling.n", defaults, "100000");
    take(r.count("sampling.seed"), smp.seed, "sampling.seed", defaults, "0");
    if (const auto* arr = r.array("sampling.checkpoints")) {
        for (const auto& v : *arr) {
            if (!v.is_integer() || std::get<std::int64_t>(v.data) < 0)
                Reader::value_error("sampling.checkpoints", "expected non-negative integers", &v);
            smp.checkpoints.push_back(static_cast<std::uint64_t>(std::get<std::int64_t>(v.data)));
        }
    }
    take(r.count("sampling.bins"), smp.bins, "sampling.bins", defaults, "64");
    if (auto blur = r.quantity("sampling.blur", Dimension::length))
        smp.blur = *blur;
    if (auto model = r.string("sampling.model")) {
        if (*model != "H0" && *model != "H1")
            Reader::value_error("sampling.model", "expected \"H0\" or \"H1\"");
        smp.model = *model;
    }

    // [sweep]
    auto& sw = c.sweep;
    take(r.count("sweep.steps"), sw.steps, "sweep.steps", defaults, "9");
    take(r.count("sweep.ensemble_steps"), sw.ensemble_steps, "sweep.ensemble_steps", defaults, "32");
    if (const auto* arr = r.array("sweep.distances"))
        for (const auto& v : *arr)
            sw.distances.push_back(Reader::quantity_of(v, Dimension::length, "sweep.distances"));
    take(r.number("sweep.onset_threshold"), sw.onset_threshold, "sweep.onset_threshold", defaults,
         "0.5");

    // [feasibility]
    auto& f = c.feasibility;
    using D = Dimension;
    take(r.string("feasibility.species"), f.species, "feasibility.species", defaults, "\"Ca+\"");
    take(r.quantity("feasibility.drop_height", D::length), f.drop_height, "feasibility.drop_height",
         defaults, "\"1cm\"");
    take(r.quantity("feasibility.slit_width", D::length), f.slit_width, "feasibility.slit_width",
         defaults, "\"200nm\"");
    take(r.quantity("feasibility.radial_freq", D::frequency), f.radial_freq,
         "feasibility.radial_freq", defaults, "\"1.39MHz\"");
    take(r.quantity("feasibility.axial_freq", D::frequency), f.axial_freq, "feasibility.axial_freq",
         defaults, "\"134kHz\"");
    take(r.quantity("feasibility.beam_window", D::length), f.beam_window, "feasibility.beam_window",
         defaults, "\"2um\"");
    take(r.quantity("feasibility.lens_offset_max", D::length), f.lens_offset_max,
         "feasibility.lens_offset_max", defaults, "\"50um\"");
    take(r.number("feasibility.margin_factor"), f.margin_factor, "feasibility.margin_factor",
         defaults, "100");
    take(r.quantity("feasibility.beam_width", D::length), f.beam_width, "feasibility.beam_width",
         defaults, "\"5nm\"");
    take(r.number("feasibility.wavelength_factor"), f.wavelength_factor,
         "feasibility.wavelength_factor", defaults, "10");
    take(r.quantity("feasibility.drift_budget", D::length), f.drift_budget,
         "feasibility.drift_budget", defaults, "\"2nm\"");
    f.knockout_vmax = r.quantity("feasibility.knockout_vmax", D::velocity);
    if (auto g = r.number("feasibility.gravity")) {
        f.gravity = *g;  // m/s^2, unitless by convention here
    }

    // [output]
    take(r.string("output.directory"), c.output.directory, "output.directory", defaults, "\"out\"");
    if (const auto* arr = r.array("output.formats")) {
        c.output.formats.clear();
        for (const auto& v : *arr) {
            if (!v.is_string())
                Reader::value_error("output.formats", "expected strings", &v);
            const auto& fmt = std::get<std::string>(v.data);
            if (fmt != "csv" && fmt != "json" && fmt != "svg")
                Reader::value_error("output.formats", "unknown format '" + fmt + "'", &v);
            c.output.formats.push_back(fmt);
        }
    }

    r.reject_unused();

    auto positive = [](const std::optional<double>& v, const char* key) {
        if (v && !(*v > 0.0))
            Reader::value_error(key, "must be positive");
    };
    positive(sc.wavelength, "scenario.wavelength");
    positive(sc.energy, "scenario.energy");
    positive(sc.slit_width, "scenario.slit_width");
    positive(sc.distance, "scenario.distance");
    positive(sc.grid_spacing, "scenario.grid_spacing");
    if (sc.beam_fwhm < 0.0)
        Reader::value_error("scenario.beam_fwhm", "must not be negative");
    if (sc.grid_samples < 16 || (sc.grid_samples & (sc.grid_samples - 1)) != 0)
        Reader::value_error("scenario.grid_samples", "must be a power of two >= 16");
    if (!(sc.smallness_factor > 0.0))
        Reader::value_error("scenario.smallness_factor", "must be positive");
    if (!(m.width_factor > 0.0))
        Reader::value_error("model.width_factor", "must be positive");
    if (smp.bins < 8)
        Reader::value_error("sampling.bins", "must be at least 8");
    if (smp.blur < 0.0)
        Reader::value_error("sampling.blur", "must not be negative");
    for (std::size_t i = 1; i < smp.checkpoints.size(); ++i)
        if (smp.checkpoints[i] <= smp.checkpoints[i - 1])
            Reader::value_error("sampling.checkpoints", "must be strictly increasing");
    for (double d : sw.distances)
        positive(d, "sweep.distances");
    if (sw.steps < 3)
        Reader::value_error("sweep.steps", "must be at least 3");
    if (sw.ensemble_steps < 16)
        Reader::value_error("sweep.ensemble_steps", "must be at least 16");

    // Command-specific requirements.
    const bool needs_scenario = c.command != Command::feasibility;
    if (needs_scenario) {
        if (!sc.slit_width)
            missing("scenario.slit_width");
        if (!sc.wavelength && !sc.energy)
            missing("scenario.wavelength");
        if (sc.wavelength && sc.energy)
            Reader::value_error("scenario.energy", "give either wavelength or energy, not both");
        if (c.command != Command::onset && !sc.distance)
            missing("scenario.distance");
        if (sc.source == wavefield::SourceKind::fine && !(sc.beam_fwhm > 0.0))
            missing("scenario.beam_fwhm");
    }
    if ((c.command == Command::sweep_xb || c.command == Command::compare) &&
        sc.source != wavefield::SourceKind::fine)
        Reader::value_error("scenario.source", std::string(to_string(c.command)) +
                                                   " needs a fine source");
    if (c.command == Command::onset && sw.distances.empty())
        missing("sweep.distances");
    if (c.command == Command::buildup && smp.n == 0 && smp.checkpoints.empty())
        Reader::value_error("sampling.n", "must be positive");
    return c;
}

std::string serialize_config(const RunConfig& c)
{
    std::ostringstream os;
    auto q = [](double v, Dimension d) { return quote(format_quantity(v, d)); };
    using D = Dimension;
    // Floats always carry a '.' or exponent so they re-parse as floats.
    auto num = [](double v) {
        std::string s = shortest(v);
        if (s.find_first_of(".eEn") == std::string::npos)
            s += ".0";
        return s;
    };
    os << "command = " << quote(to_string(c.command)) << "\n";

    const auto& sc = c.scenario;
    os << "\n[scenario]\n";
    os << "species = " << quote(sc.species) << "\n";
    if (sc.wavelength)
        os << "wavelength = " << q(*sc.wavelength, D::length) << "\n";
    if (sc.energy)
        os << "energy = " << q(*sc.energy, D::energy) << "\n";
    if (sc.slit_width)
        os << "slit_width = " << q(*sc.slit_width, D::length) << "\n";
    if (sc.distance)
        os << "distance = " << q(*sc.distance, D::length) << "\n";
    os << "source = " << quote(wavefield::to_string(sc.source)) << "\n";
    os << "beam_fwhm = " << q(sc.beam_fwhm, D::length) << "\n";
    os << "beam_offset = " << q(sc.beam_offset, D::length) << "\n";
    os << "kernel = " << quote(sc.kernel ? wavefield::to_string(*sc.kernel) : "auto") << "\n";
    os << "grid_samples = " << sc.grid_samples << "\n";
    if (sc.grid_spacing)
        os << "grid_spacing = " << q(*sc.grid_spacing, D::length) << "\n";
    os << "smallness_factor = " << num(sc.smallness_factor) << "\n";

    const auto& m = c.model;
    os << "\n[model]\n";
    os << "gain = " << num(m.gain) << "\n";
    os << "width_factor = " << num(m.width_factor) << "\n";
    os << "sign = " << m.sign << "\n";
    os << "mask = " << (m.mask ? "true" : "false") << "\n";

    const auto& s = c.sampling;
    os << "\n[sampling]\n";
    os << "n = " << s.n << "\n";
    os << "seed = " << s.seed << "\n";
    os << "checkpoints = [";
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
        os << (i ? ", " : "") << s.checkpoints[i];
    os << "]\n";
    os << "bins = " << s.bins << "\n";
    os << "blur = " << q(s.blur, D::length) << "\n";
    os << "model = " << quote(s.model) << "\n";

    const auto& sw = c.sweep;
    os << "\n[sweep]\n";
    os << "steps = " << sw.steps << "\n";
    os << "ensemble_steps = " << sw.ensemble_steps << "\n";
    os << "distances = [";
    for (std::size_t i = 0; i < sw.distances.size(); ++i)
        os << (i ? ", " : "") << q(sw.distances[i], D::length);
    os << "]\n";
    os << "onset_threshold = " << num(sw.onset_threshold) << "\n";

    const auto& f = c.feasibility;
    os << "\n[feasibility]\n";
    os << "species = " << quote(f.species) << "\n";
    os << "drop_height = " << q(f.drop_height, D::length) << "\n";
    os << "slit_width = " << q(f.slit_width, D::length) << "\n";
    os << "radial_freq = " << q(f.radial_freq, D::frequency) << "\n";
    os << "axial_freq = " << q(f.axial_freq, D::frequency) << "\n";
    os << "beam_window = " << q(f.beam_window, D::length) << "\n";
    os << "lens_offset_max = " << q(f.lens_offset_max, D::length) << "\n";
    os << "margin_factor = " << num(f.margin_factor) << "\n";
    os << "beam_width = " << q(f.beam_width, D::length) << "\n";
    os << "wavelength_factor = " << num(f.wavelength_factor) << "\n";
    os << "drift_budget = " << q(f.drift_budget, D::length) << "\n";
    if (f.knockout_vmax)
        os << "knockout_vmax = " << q(*f.knockout_vmax, D::velocity) << "\n";
    os << "gravity = " << num(f.gravity) << "\n";

    os << "\n[output]\n";
    os << "directory = " << quote(c.output.directory) << "\n";
    os << "formats = [";
    for (std::size_t i = 0; i < c.output.formats.size(); ++i)
        os << (i ? ", " : "") << quote(c.output.formats[i]);
    os << "]\n";

    for (const auto& e : c.species) {
        os << "\n[species." << quote(e.name) << "]\n";
        os << "mass = " << q(e.mass, D::mass) << "\n";
        os << "charge = " << quote(e.charge) << "\n";
    }
    return os.str();
}

}  // namespace slitlab::cli
