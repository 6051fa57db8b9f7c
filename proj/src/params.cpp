#include "spump/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spump {
namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw std::invalid_argument(field + ": must satisfy " + constraint);
}

}  // namespace

double SchemeParams::spontaneous_rate(Level from, Level to) const {
    auto it = spontaneous.find({from, to});
    return it == spontaneous.end() ? 0.0 : it->second;
}

bool SchemeParams::uses_leak_level() const {
    for (const auto& [key, rate] : spontaneous)
        if ((key.second == Level::leak) && key.first != key.second && rate > 0.0) return true;
    return false;
}

void SchemeParams::validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    require(finite_nonneg(omega_s), "omega_s", ">= 0");
    require(finite_nonneg(omega_c), "omega_c", ">= 0");
    require(std::isfinite(r) && std::abs(r) < 1.0, "r", "|r| < 1");
    require(std::isfinite(phi), "phi", "finite");
    require(finite_nonneg(gamma_up_a), "gamma_up_a", ">= 0");
    require(finite_nonneg(gamma_down_a), "gamma_down_a", ">= 0");
    require(finite_nonneg(gamma_aa), "gamma_aa", ">= 0");
    require(finite_nonneg(kappa), "kappa", ">= 0");
    require(finite_nonneg(nbar), "nbar", ">= 0");
    require(std::isfinite(eta3) && eta3 > 0.0 && eta3 < 1.0, "eta3", "0 < eta3 < 1");
    require(std::isfinite(eta4) && eta4 >= 0.0 && eta4 < 1.0, "eta4", "0 <= eta4 < 1");
    require(finite_nonneg(delta), "delta", ">= 0");
    require(finite_nonneg(kappa4), "kappa4", ">= 0");
    for (const auto& [key, rate] : spontaneous) {
        const std::string name = std::string("spont.") + level_name(key.first) + "_to_" + level_name(key.second);
        require(finite_nonneg(rate), name, ">= 0");
        require(key.first != Level::leak, name, "no decay out of the leak level");
    }
}

const std::vector<std::string>& channel_names() {
    static const std::vector<std::string> names{"sideband", "carrier",     "repump", "cooling",
                                                "heating",  "spontaneous", "mode4"};
    return names;
}

Channels Channels::parse(const std::string& list) {
    Channels ch = Channels::none();
    std::stringstream ss(list);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        tok = b == std::string::npos ? "" : tok.substr(b, e - b + 1);
        if (tok.empty()) continue;
        if (first && tok == "all") ch = Channels::all();
        else if (first && tok == "none") ch = Channels::none();
        else {
            const bool on = tok[0] != '-';
            const std::string name = on ? tok : tok.substr(1);
            bool* flags[] = {&ch.sideband, &ch.carrier, &ch.repump, &ch.cooling, &ch.heating, &ch.spontaneous, &ch.mode4};
            const auto& names = channel_names();
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw std::invalid_argument("unknown channel '" + name + "'");
            *flags[it - names.begin()] = on;
        }
        first = false;
    }
    return ch;
}

std::string Channels::to_string() const {
    std::string out;
    const bool flags[] = {sideband, carrier, repump, cooling, heating, spontaneous, mode4};
    for (std::size_t i = 0; i < channel_names().size(); ++i)
        if (flags[i]) out += (out.empty() ? "" : ",") + channel_names()[i];
    return out.empty() ? "none" : out;
}

GammaTable uniform_gamma_table(double omega_s, double fraction, double leak_fraction) {
    const double g = omega_s * fraction;
    return {
        {{Level::down, Level::up}, g},  {{Level::up, Level::down}, g},  {{Level::down, Level::aux}, g},
        {{Level::up, Level::aux}, g},   {{Level::aux, Level::up}, g},   {{Level::aux, Level::down}, g},
        {{Level::up, Level::leak}, omega_s * leak_fraction},
    };
}

}  // namespace spump
