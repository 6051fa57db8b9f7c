#include "spump/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "spump/rate_model.hpp"

namespace spump {
namespace {

struct Entry {
    std::string key, value, unit;
    int line = 0, value_col = 0, unit_col = 0;
};

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    return std::string(buf, res.ptr);
}

[[noreturn]] void fail_at(const Entry& e, int col, const std::string& msg) { throw ConfigParseError(e.line, col, msg); }

double parse_number(const Entry& e) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || ptr != end) fail_at(e, e.value_col, "expected a number, got '" + e.value + "'");
    if (!std::isfinite(v)) fail_at(e, e.value_col, "number must be finite");
    return v;
}

long long parse_integer(const Entry& e) {
    long long v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || ptr != end) fail_at(e, e.value_col, "expected an integer, got '" + e.value + "'");
    return v;
}

void no_unit(const Entry& e) {
    if (!e.unit.empty()) fail_at(e, e.unit_col, "key '" + e.key + "' takes no unit");
}

/// Rates and angular frequencies in SI (1/s or rad/s).
double rate_value(const Entry& e, double omega_s) {
    const double v = parse_number(e);
    const std::string& u = e.unit;
    if (u.empty() || u == "per_s" || u == "rad_per_s") return v;
    if (u == "khz_2pi") return kTwoPi * 1e3 * v;
    if (u == "hz_2pi") return kTwoPi * v;
    if (u == "us_1e" || u == "ms_1e") {
        if (v <= 0) fail_at(e, e.value_col, "1/e time must be > 0");
        return 1.0 / (v * (u == "us_1e" ? 1e-6 : 1e-3));
    }
    if (u == "frac_omega_s") return v * omega_s;
    fail_at(e, e.unit_col, "unit '" + u + "' is not a rate unit");
}

double duration_value(const Entry& e) {
    const double v = parse_number(e);
    const std::string& u = e.unit;
    if (u.empty() || u == "s") return v;
    if (u == "ms") return v * 1e-3;
    if (u == "us") return v * 1e-6;
    fail_at(e, e.unit_col, "unit '" + u + "' is not a duration unit");
}

Level parse_level(const std::string& s) {
    for (Level l : {Level::down, Level::up, Level::aux, Level::leak})
        if (s == level_name(l)) return l;
    throw std::invalid_argument("unknown level '" + s + "'");
}

bool parse_bool(const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail_at(e, e.value_col, "expected true or false");
}

using Setter = std::function<void(RunConfig&, const Entry&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto rate = [&t](const std::string& key, double SchemeParams::*field) {
            t[key] = [field](RunConfig& c, const Entry& e) {
                c.experiment.params.*field = rate_value(e, c.experiment.params.omega_s);
            };
        };
        auto plain = [&t](const std::string& key, double SchemeParams::*field) {
            t[key] = [field](RunConfig& c, const Entry& e) {
                no_unit(e);
                c.experiment.params.*field = parse_number(e);
            };
        };
        t["protocol"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            if (e.value == "continuous") c.experiment.kind = ProtocolKind::continuous;
            else if (e.value == "stepwise") c.experiment.kind = ProtocolKind::stepwise;
            else fail_at(e, e.value_col, "protocol must be continuous or stepwise");
        };
        rate("omega_s", &SchemeParams::omega_s);
        rate("omega_c", &SchemeParams::omega_c);
        rate("gamma_up_a", &SchemeParams::gamma_up_a);
        rate("gamma_down_a", &SchemeParams::gamma_down_a);
        rate("gamma_aa", &SchemeParams::gamma_aa);
        rate("kappa", &SchemeParams::kappa);
        rate("delta", &SchemeParams::delta);
        rate("kappa4", &SchemeParams::kappa4);
        plain("r", &SchemeParams::r);
        plain("phi", &SchemeParams::phi);
        plain("nbar", &SchemeParams::nbar);
        plain("eta3", &SchemeParams::eta3);
        plain("eta4", &SchemeParams::eta4);
        // 1/e depletion of |a> is 1/(gamma_up_a + gamma_down_a); branching 5:4:3.
        t["repump_depletion"] = [](RunConfig& c, const Entry& e) {
            const double total = rate_value(e, c.experiment.params.omega_s);
            c.experiment.params.gamma_up_a = total * 5.0 / 9.0;
            c.experiment.params.gamma_down_a = total * 4.0 / 9.0;
            c.experiment.params.gamma_aa = total * 3.0 / 9.0;
        };
        t["spont.uniform"] = [](RunConfig& c, const Entry& e) {
            const double g = rate_value(e, c.experiment.params.omega_s);
            for (auto [from, to] : {std::pair{Level::down, Level::up}, {Level::up, Level::down}, {Level::down, Level::aux},
                                    {Level::up, Level::aux}, {Level::aux, Level::up}, {Level::aux, Level::down}})
                c.experiment.params.spontaneous[{from, to}] = g;
        };
        t["channels"] = [](RunConfig& c, const Entry& e) {
            const std::string list = e.unit.empty() ? e.value : e.value + " " + e.unit;
            try {
                c.experiment.continuous.channels = c.experiment.stepwise.channels = Channels::parse(list);
            } catch (const std::invalid_argument& ex) {
                fail_at(e, e.value_col, ex.what());
            }
        };
        t["initial"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            const auto comma = e.value.find(',');
            try {
                if (comma == std::string::npos) throw std::invalid_argument("expected two levels, e.g. down,down");
                const Level a = parse_level(e.value.substr(0, comma)), b = parse_level(e.value.substr(comma + 1));
                if (a == Level::leak || b == Level::leak) throw std::invalid_argument("cannot start in x");
                c.experiment.initial = {a, b};
            } catch (const std::invalid_argument& ex) {
                fail_at(e, e.value_col, ex.what());
            }
        };
        t["continuous.duration"] = [](RunConfig& c, const Entry& e) { c.experiment.continuous.duration = duration_value(e); };
        t["continuous.sample_every"] = [](RunConfig& c, const Entry& e) {
            c.experiment.continuous.sample_every = duration_value(e);
        };
        t["continuous.window_start"] = [](RunConfig& c, const Entry& e) {
            c.experiment.continuous.window_start = duration_value(e);
        };
        t["continuous.window_end"] = [](RunConfig& c, const Entry& e) {
            c.experiment.continuous.window_end = duration_value(e);
        };
        t["stepwise.n_steps"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.stepwise.n_steps = static_cast<int>(parse_integer(e));
        };
        t["stepwise.t_cool"] = [](RunConfig& c, const Entry& e) { c.experiment.stepwise.t_cool = duration_value(e); };
        t["stepwise.t_coh"] = [](RunConfig& c, const Entry& e) { c.experiment.stepwise.t_coh = duration_value(e); };
        t["stepwise.t_repump"] = [](RunConfig& c, const Entry& e) { c.experiment.stepwise.t_repump = duration_value(e); };
        t["stepwise.cooling_mode"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            if (e.value == "thermal_reset") c.experiment.stepwise.cooling_mode = CoolingMode::thermal_reset;
            else if (e.value == "lindblad") c.experiment.stepwise.cooling_mode = CoolingMode::lindblad;
            else fail_at(e, e.value_col, "cooling_mode must be thermal_reset or lindblad");
        };
        t["stepwise.window_first"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.stepwise.window_first = static_cast<int>(parse_integer(e));
        };
        t["stepwise.window_last"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.stepwise.window_last = static_cast<int>(parse_integer(e));
        };
        t["ensemble.r_mean"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.ensemble.r_mean = parse_number(e);
        };
        t["ensemble.r_rms"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.ensemble.r_rms = parse_number(e);
        };
        t["ensemble.nodes"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.ensemble.nodes = static_cast<int>(parse_integer(e));
        };
        t["numerics.mode3_dim"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.numerics.mode3_dim = static_cast<int>(parse_integer(e));
        };
        t["numerics.mode4_dim"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.numerics.mode4_dim = static_cast<int>(parse_integer(e));
        };
        t["numerics.tol"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.numerics.tol = parse_number(e);
        };
        t["numerics.explicit_leak"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.numerics.explicit_leak = parse_bool(e);
        };
        t["numerics.max_steps"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            const auto v = parse_integer(e);
            if (v < 0) fail_at(e, e.value_col, "must be >= 0");
            c.experiment.numerics.max_steps = static_cast<std::size_t>(v);
        };
        t["numerics.threads"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.experiment.numerics.threads = static_cast<int>(parse_integer(e));
        };
        t["rate.variant"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            try {
                parse_variant(e.value);
            } catch (const std::invalid_argument& ex) {
                fail_at(e, e.value_col, ex.what());
            }
            c.variant = e.value;
        };
        t["seed"] = [](RunConfig& c, const Entry& e) {
            no_unit(e);
            c.seed = static_cast<unsigned long long>(parse_integer(e));
        };
        return t;
    }();
    return table;
}

void apply_entry(RunConfig& cfg, const Entry& e) {
    if (e.key.rfind("spont.", 0) == 0 && e.key != "spont.uniform") {
        const std::string rest = e.key.substr(6);
        const auto sep = rest.find("_to_");
        if (sep == std::string::npos) fail_at(e, 1, "scattering keys look like spont.<from>_to_<to>");
        Level from, to;
        try {
            from = parse_level(rest.substr(0, sep));
            to = parse_level(rest.substr(sep + 4));
        } catch (const std::invalid_argument& ex) {
            fail_at(e, 1, ex.what());
        }
        if (from == to) fail_at(e, 1, "same-level scattering is not modelled");
        cfg.experiment.params.spontaneous[{from, to}] = rate_value(e, cfg.experiment.params.omega_s);
        return;
    }
    const auto it = setters().find(e.key);
    if (it == setters().end()) fail_at(e, 1, "unknown key '" + e.key + "'");
    it->second(cfg, e);
}

/// Splits one line; returns false for blank/comment lines.
bool split_line(const std::string& raw, int line_no, Entry& e) {
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) return false;
    e = Entry{};
    e.line = line_no;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigParseError(line_no, static_cast<int>(first) + 1, "expected 'key = value'");
    auto trim_end = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
    };
    e.key = trim_end(line.substr(first, eq - first));
    if (e.key.empty()) throw ConfigParseError(line_no, static_cast<int>(first) + 1, "missing key");
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    if (vstart == std::string::npos) throw ConfigParseError(line_no, static_cast<int>(eq) + 2, "missing value");
    const std::string rest = trim_end(line.substr(vstart));
    const auto space = rest.find_first_of(" \t");
    e.value_col = static_cast<int>(vstart) + 1;
    if (space == std::string::npos) {
        e.value = rest;
    } else {
        e.value = rest.substr(0, space);
        const auto ustart = rest.find_first_not_of(" \t", space);
        e.unit = rest.substr(ustart);
        e.unit_col = static_cast<int>(vstart + ustart) + 1;
        if (e.unit.find_first_of(" \t") != std::string::npos)
            throw ConfigParseError(line_no, e.unit_col, "unexpected text after unit");
    }
    return true;
}

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> p{
        {"continuous_fig2", R"(# Continuous pumping: sideband, carrier, repump and cooling applied together.
protocol = continuous
omega_s = 7.8 khz_2pi
omega_c = 0.543 khz_2pi
repump_depletion = 88 us_1e
kappa = 203 us_1e
nbar = 0.11
eta3 = 0.180
eta4 = 0.155
delta = 250 khz_2pi
kappa4 = 0.8 khz_2pi
# Scattering rates are not measured: magnitudes chosen to match the reported
# scattering error and the bound on population leaving the manifold.
spont.uniform = 2e-4 frac_omega_s
spont.up_to_x = 0.65e-4 frac_omega_s
channels = all
initial = down,down
ensemble.r_rms = 0.014
ensemble.nodes = 7
continuous.duration = 12 ms
continuous.sample_every = 50 us
continuous.window_start = 6 ms
continuous.window_end = 12 ms
rate.variant = thermal_4x
)"},
        {"stepwise_fig3", R"(# Stepwise pumping: cool, coherent 2 pi pulse, repump, repeated.
protocol = stepwise
omega_s = 8.4 khz_2pi
omega_c = 1.24 khz_2pi
repump_depletion = 3 us_1e
kappa = 203 us_1e
nbar = 0.08
eta3 = 0.180
eta4 = 0.155
delta = 250 khz_2pi
kappa4 = 0.8 khz_2pi
# Scattering rates are not measured: magnitudes chosen to match the reported
# scattering error and the bound on population leaving the manifold.
spont.uniform = 2e-4 frac_omega_s
spont.up_to_x = 0.65e-4 frac_omega_s
channels = all
initial = down,down
ensemble.r_rms = 0.014
ensemble.nodes = 7
stepwise.n_steps = 60
stepwise.t_cool = 100 us
stepwise.t_repump = 6 us
stepwise.cooling_mode = thermal_reset
stepwise.window_first = 35
stepwise.window_last = 59
rate.variant = thermal_4x
)"},
    };
    return p;
}

}  // namespace

ConfigParseError::ConfigParseError(int l, int c, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l), column(c) {}

ConfigValidationError::ConfigValidationError(const std::string& k, const std::string& msg)
    : std::invalid_argument(k + ": " + msg), key(k) {}

void RunConfig::validate() const {
    try {
        experiment.params.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        throw ConfigValidationError(what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
    }
    const auto& x = experiment;
    auto need = [](bool ok, const char* key, const char* msg) {
        if (!ok) throw ConfigValidationError(key, msg);
    };
    need(x.continuous.duration >= 0, "continuous.duration", "must be >= 0");
    need(x.continuous.sample_every >= 0, "continuous.sample_every", "must be >= 0");
    need(x.continuous.window_start <= x.continuous.window_end, "continuous.window_start", "must not exceed window_end");
    need(x.continuous.window_end <= x.continuous.duration, "continuous.window_end", "must not exceed duration");
    need(x.stepwise.n_steps >= 0, "stepwise.n_steps", "must be >= 0");
    need(x.stepwise.t_cool >= 0, "stepwise.t_cool", "must be >= 0");
    need(x.stepwise.t_coh >= 0, "stepwise.t_coh", "must be >= 0");
    need(x.stepwise.t_repump >= 0, "stepwise.t_repump", "must be >= 0");
    need(x.stepwise.window_first <= x.stepwise.window_last, "stepwise.window_first", "must not exceed window_last");
    need(x.ensemble.r_rms >= 0, "ensemble.r_rms", "must be >= 0");
    need(x.ensemble.nodes >= 1 && x.ensemble.nodes % 2 == 1, "ensemble.nodes", "must be odd and >= 1");
    need(x.numerics.mode3_dim >= 2, "numerics.mode3_dim", "must be >= 2");
    need(x.numerics.mode4_dim >= 2, "numerics.mode4_dim", "must be >= 2");
    need(x.numerics.tol >= 1e-12 && x.numerics.tol <= 1e-4, "numerics.tol", "must lie in [1e-12, 1e-4]");
    need(x.numerics.threads >= 0, "numerics.threads", "must be >= 0");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::vector<Entry> deferred;  // relative to omega_s, resolved last
    std::map<std::string, int> seen;
    try {
        while (std::getline(in, raw)) {
            ++line_no;
            Entry e;
            if (!split_line(raw, line_no, e)) continue;
            if (auto [it, fresh] = seen.emplace(e.key, line_no); !fresh)
                throw ConfigParseError(line_no, 1, "duplicate key '" + e.key + "' (first on line " + std::to_string(it->second) + ")");
            if (e.unit == "frac_omega_s") deferred.push_back(e);
            else apply_entry(cfg, e);
        }
        for (const Entry& e : deferred) apply_entry(cfg, e);
    } catch (const ConfigParseError& e) {
        throw ConfigParseError(e.line, e.column, source + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    Entry e;
    if (!split_line(assignment, 1, e)) throw ConfigParseError(1, 1, "empty override");
    apply_entry(cfg, e);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    const auto& x = c.experiment;
    const auto& p = x.params;
    std::vector<std::pair<std::string, std::string>> out{
        {"protocol", protocol_name(x.kind)},
        {"omega_s", fmt(p.omega_s)},
        {"omega_c", fmt(p.omega_c)},
        {"r", fmt(p.r)},
        {"phi", fmt(p.phi)},
        {"gamma_up_a", fmt(p.gamma_up_a)},
        {"gamma_down_a", fmt(p.gamma_down_a)},
        {"gamma_aa", fmt(p.gamma_aa)},
        {"kappa", fmt(p.kappa)},
        {"nbar", fmt(p.nbar)},
        {"eta3", fmt(p.eta3)},
        {"eta4", fmt(p.eta4)},
        {"delta", fmt(p.delta)},
        {"kappa4", fmt(p.kappa4)},
    };
    for (const auto& [key, rate] : p.spontaneous)
        out.emplace_back(std::string("spont.") + level_name(key.first) + "_to_" + level_name(key.second), fmt(rate));
    // Channels are shared by both schedules in the file format.
    out.emplace_back("channels", x.continuous.channels.to_string());
    out.emplace_back("initial", std::string(level_name(x.initial.ion1)) + "," + level_name(x.initial.ion2));
    out.emplace_back("continuous.duration", fmt(x.continuous.duration));
    out.emplace_back("continuous.sample_every", fmt(x.continuous.sample_every));
    out.emplace_back("continuous.window_start", fmt(x.continuous.window_start));
    out.emplace_back("continuous.window_end", fmt(x.continuous.window_end));
    out.emplace_back("stepwise.n_steps", std::to_string(x.stepwise.n_steps));
    out.emplace_back("stepwise.t_cool", fmt(x.stepwise.t_cool));
    out.emplace_back("stepwise.t_coh", fmt(x.stepwise.t_coh));
    out.emplace_back("stepwise.t_repump", fmt(x.stepwise.t_repump));
    out.emplace_back("stepwise.cooling_mode", cooling_mode_name(x.stepwise.cooling_mode));
    out.emplace_back("stepwise.window_first", std::to_string(x.stepwise.window_first));
    out.emplace_back("stepwise.window_last", std::to_string(x.stepwise.window_last));
    out.emplace_back("ensemble.r_mean", fmt(x.ensemble.r_mean));
    out.emplace_back("ensemble.r_rms", fmt(x.ensemble.r_rms));
    out.emplace_back("ensemble.nodes", std::to_string(x.ensemble.nodes));
    out.emplace_back("numerics.mode3_dim", std::to_string(x.numerics.mode3_dim));
    out.emplace_back("numerics.mode4_dim", std::to_string(x.numerics.mode4_dim));
    out.emplace_back("numerics.tol", fmt(x.numerics.tol));
    out.emplace_back("numerics.explicit_leak", x.numerics.explicit_leak ? "true" : "false");
    out.emplace_back("numerics.threads", std::to_string(x.numerics.threads));
    out.emplace_back("numerics.max_steps", std::to_string(x.numerics.max_steps));
    out.emplace_back("rate.variant", c.variant);
    out.emplace_back("seed", std::to_string(c.seed));
    return out;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# resolved configuration, SI units (rad/s, 1/s, s)\n";
    for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << "\n";
    return os.str();
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : presets()) out.push_back(k);
    return out;
}

std::string preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw std::invalid_argument("unknown preset '" + name + "'");
    return it->second;
}

RunConfig preset_config(const std::string& name) {
    RunConfig cfg = parse_config(preset_text(name), "preset " + name);
    cfg.preset = name;
    return cfg;
}

}  // namespace spump
