#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spump/layout.hpp"

namespace spump {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Sideband-laser spontaneous scattering rates Gamma_{to,from} in 1/s, keyed
/// by (from, to). Entries with from == to are ignored.
using GammaTable = std::map<std::pair<Level, Level>, double>;

/// Physical parameters. All Rabi frequencies and detunings are angular
/// (rad/s); all rates are 1/s.
struct SchemeParams {
    double omega_s = 0.0;   // sideband Rabi frequency
    double omega_c = 0.0;   // carrier (microwave) Rabi frequency
    double r = 0.0;         // sideband imbalance between the ions
    double phi = 0.0;       // sideband phase difference, ion 2 relative to ion 1
    double gamma_up_a = 0.0;    // repump a -> up
    double gamma_down_a = 0.0;  // repump a -> down
    double gamma_aa = 0.0;      // repump a -> a (enters only the linewidth)
    double kappa = 0.0;     // mode-3 cooling
    double nbar = 0.0;      // mode-3 occupation under cooling alone
    GammaTable spontaneous;
    double eta3 = 0.180;
    double eta4 = 0.155;
    double delta = 0.0;     // mode 3 - mode 4 splitting
    double kappa4 = 0.0;    // mode-4 cooling

    double heating_rate() const { return kappa * nbar / (1.0 + nbar); }
    /// gamma = gamma_down_a + gamma_up_a + gamma_aa
    double repump_linewidth() const { return gamma_up_a + gamma_down_a + gamma_aa; }
    double mode4_coupling() const { return omega_s * eta4 / eta3; }
    double spontaneous_rate(Level from, Level to) const;
    bool uses_leak_level() const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Switches for the individual physical processes.
struct Channels {
    bool sideband = true;
    bool carrier = true;
    bool repump = true;
    bool cooling = true;
    bool heating = true;
    bool spontaneous = true;
    bool mode4 = true;

    static Channels all() { return {}; }
    static Channels none() { return {false, false, false, false, false, false, false}; }
    /// Comma-separated names, "-name" switches one off; "all" and "none" are
    /// accepted as the first token.
    static Channels parse(const std::string& list);
    std::string to_string() const;
    bool operator==(const Channels&) const = default;
};

/// Names understood by Channels::parse.
const std::vector<std::string>& channel_names();

/// Gamma-table at a uniform magnitude (fraction of omega_s) on every qubit/aux
/// scattering channel plus the up -> x leak. Not measured values.
GammaTable uniform_gamma_table(double omega_s, double fraction, double leak_fraction);

}  // namespace spump
