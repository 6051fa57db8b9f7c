#include "spump/model.hpp"

#include <cmath>
#include <stdexcept>

namespace spump {
namespace {

QuantumOperator on_ion(const HilbertLayout& layout, int ion, Level to, Level from) {
    return embed_ion_operator(layout, ion, ion_transition(layout, to, from));
}

void require_mode3(const HilbertLayout& layout) {
    if (layout.mode_count() < 1) throw std::invalid_argument("layout has no mode 3");
}

}  // namespace

QuantumOperator build_coherent_hamiltonian(const SchemeParams& p, const HilbertLayout& layout, bool sideband,
                                           bool carrier) {
    if (!layout.has_level(Level::aux)) throw std::invalid_argument("coherent hamiltonian needs the a level");
    require_mode3(layout);
    QuantumOperator h(layout);
    if (sideband && p.omega_s != 0.0) {
        const QuantumOperator bdag = mode_lowering(layout, 0).adjoint();
        const QuantumOperator s1 = on_ion(layout, 1, Level::up, Level::down);
        const QuantumOperator s2 = on_ion(layout, 2, Level::up, Level::down);
        const QuantumOperator drive = cplx(1.0 - p.r / 2.0) * s1 + (1.0 + p.r / 2.0) * std::polar(1.0, p.phi) * s2;
        const QuantumOperator a = cplx(p.omega_s) * (drive * bdag);
        h += a + a.adjoint();
    }
    if (carrier && p.omega_c != 0.0) {
        const QuantumOperator c = cplx(p.omega_c) * (on_ion(layout, 1, Level::aux, Level::up) +
                                                     on_ion(layout, 2, Level::aux, Level::up));
        h += c + c.adjoint();
    }
    return h;
}

QuantumOperator build_mode4_coupling(const SchemeParams& p, const HilbertLayout& layout) {
    if (!layout.has_mode4()) throw std::invalid_argument("mode-4 channel unavailable: layout has no mode 4");
    const double g4 = p.mode4_coupling();
    if (g4 == 0.0) return QuantumOperator(layout);
    const QuantumOperator cdag = mode_lowering(layout, 1).adjoint();
    const QuantumOperator s = on_ion(layout, 1, Level::up, Level::down) - on_ion(layout, 2, Level::up, Level::down);
    return cplx(g4) * (s * cdag);
}

QuantumOperator build_mode4_hamiltonian(const SchemeParams& p, const HilbertLayout& layout, double t) {
    const QuantumOperator a = build_mode4_coupling(p, layout);
    const cplx phase = std::polar(1.0, -p.delta * t);
    return phase * a + std::conj(phase) * a.adjoint();
}

std::vector<QuantumOperator> build_cooling_lindblads(const SchemeParams& p, const HilbertLayout& layout) {
    require_mode3(layout);
    const QuantumOperator b = mode_lowering(layout, 0);
    std::vector<QuantumOperator> out;
    out.push_back(cplx(std::sqrt(p.kappa)) * b);
    out.push_back(cplx(std::sqrt(p.heating_rate())) * b.adjoint());
    if (layout.has_mode4()) out.push_back(cplx(std::sqrt(p.kappa4)) * mode_lowering(layout, 1));
    return out;
}

std::vector<QuantumOperator> build_repump_lindblads(const SchemeParams& p, const HilbertLayout& layout) {
    if (!layout.has_level(Level::aux)) throw std::invalid_argument("repump needs the a level");
    std::vector<QuantumOperator> out;
    for (int ion = 1; ion <= 2; ++ion) {
        if (p.gamma_up_a > 0.0) out.push_back(cplx(std::sqrt(p.gamma_up_a)) * on_ion(layout, ion, Level::up, Level::aux));
        if (p.gamma_down_a > 0.0)
            out.push_back(cplx(std::sqrt(p.gamma_down_a)) * on_ion(layout, ion, Level::down, Level::aux));
    }
    return out;
}

std::vector<QuantumOperator> build_spontaneous_lindblads(const SchemeParams& p, const HilbertLayout& layout,
                                                         bool skip_leak_targets) {
    std::vector<QuantumOperator> out;
    for (const auto& [key, rate] : p.spontaneous) {
        const auto [from, to] = key;
        if (from == to || rate <= 0.0) continue;
        if (to == Level::leak && !layout.has_level(Level::leak)) {
            if (skip_leak_targets) continue;
            throw std::invalid_argument(std::string("spontaneous channel ") + level_name(from) +
                                        " -> x needs a 4-level layout");
        }
        if (!layout.has_level(from)) continue;  // nothing populates it
        for (int ion = 1; ion <= 2; ++ion) out.push_back(cplx(std::sqrt(rate)) * on_ion(layout, ion, to, from));
    }
    return out;
}

std::vector<QuantumOperator> build_leak_losses(const SchemeParams& p, const HilbertLayout& layout) {
    std::vector<QuantumOperator> out;
    if (layout.has_level(Level::leak)) return out;
    for (const auto& [key, rate] : p.spontaneous) {
        const auto [from, to] = key;
        if (to != Level::leak || from == to || rate <= 0.0 || !layout.has_level(from)) continue;
        for (int ion = 1; ion <= 2; ++ion) out.push_back(cplx(std::sqrt(rate)) * on_ion(layout, ion, from, from));
    }
    return out;
}

HilbertLayout model_layout(const SchemeParams& p, const Channels& ch, int mode3_dim, int mode4_dim,
                           bool explicit_leak) {
    const int levels = explicit_leak && ch.spontaneous && p.uses_leak_level() ? 4 : 3;
    std::vector<int> modes{mode3_dim};
    if (ch.mode4) modes.push_back(mode4_dim);
    return HilbertLayout(levels, std::move(modes));
}

LindbladGenerator assemble_generator(const SchemeParams& p, const HilbertLayout& layout, const Channels& ch) {
    QuantumOperator h = build_coherent_hamiltonian(p, layout, ch.sideband, ch.carrier);
    std::vector<OscillatingTerm> osc;
    if (ch.mode4 && layout.has_mode4()) {
        QuantumOperator a = build_mode4_coupling(p, layout);
        if (!a.is_zero()) osc.push_back({std::move(a), p.delta});
    }

    std::vector<QuantumOperator> jumps;
    const auto cooling = build_cooling_lindblads(p, layout);
    if (ch.cooling) jumps.push_back(cooling[0]);
    if (ch.heating) jumps.push_back(cooling[1]);
    if (ch.cooling && cooling.size() > 2) jumps.push_back(cooling[2]);
    if (ch.repump)
        for (auto& l : build_repump_lindblads(p, layout)) jumps.push_back(std::move(l));

    std::vector<QuantumOperator> losses;
    if (ch.spontaneous) {
        for (auto& l : build_spontaneous_lindblads(p, layout, true)) jumps.push_back(std::move(l));
        losses = build_leak_losses(p, layout);
    }
    return LindbladGenerator(layout, std::move(h), std::move(osc), std::move(jumps), std::move(losses));
}

}  // namespace spump
